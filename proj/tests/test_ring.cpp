#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mtreg/errors.hpp"
#include "mtreg/group.hpp"
#include "mtreg/ring.hpp"
#include "mtreg/simgen.hpp"
#include "mtreg/spectra.hpp"

using namespace mtreg;
using testutil::gaussian;

namespace {

std::mt19937_64 gen(31);

ring::Options with_lambda(double lambda, std::uint64_t seed = 0) {
  ring::Options o;
  o.lambda = lambda;
  o.seed = seed;
  return o;
}

MultiTaskDataset rotate(const MultiTaskDataset& d, const Matrix& u) {
  std::vector<Task> tasks;
  for (const auto& t : d.tasks()) tasks.push_back(Task{t.design * u, t.response});
  return MultiTaskDataset(std::move(tasks));
}

}  // namespace

TEST(RidgeStep, Examples) {
  const Matrix x = Matrix::Ones(2, 1);
  const Vector y = Vector::Ones(2);
  EXPECT_NEAR(ring::ridge_step(x, y, Matrix::Identity(1, 1), 2.0)(0), 2.0 / 3.0, 1e-9);
  const Matrix xr = gaussian(8, 3, gen);
  const Vector yr = gaussian(8, 1, gen);
  const Vector ols = (xr.transpose() * xr).ldlt().solve(xr.transpose() * yr);
  EXPECT_LE((ring::ridge_step(xr, yr, testutil::random_psd(3, 3, gen), 0.0) - ols).norm(), 1e-10);
}

TEST(RidgeStep, LinearSystemResidual) {
  for (int t = 0; t < 10; ++t) {
    const Matrix x = gaussian(6, 4, gen);
    const Vector r = gaussian(6, 1, gen), beta = gaussian(4, 1, gen);
    const Matrix a = testutil::random_psd(4, 4, gen);
    const double lambda = 1.5;
    const Vector d = ring::ridge_step(x, r, a, lambda, &beta);
    const Matrix w = 0.5 * lambda * spectra::pinv_sqrt(ring::regularize_accumulation(a));
    const Vector resid = (x.transpose() * x + w) * d - (x.transpose() * r - w * beta);
    EXPECT_LE(resid.norm(), 1e-10 * (1 + (x.transpose() * r).norm()));
  }
}

TEST(RidgeStep, SingularWithoutPenalty) {
  try {
    ring::ridge_step(Matrix::Ones(1, 2), Vector::Ones(1), Matrix::Identity(2, 2), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularRidge);
  }
}

TEST(Ring, ZeroLambdaIsLeastSquares) {
  const auto d = testutil::random_dataset(3, 4, 12, gen);
  const ring::Fit f = ring::fit(d, with_lambda(0.0));
  EXPECT_TRUE(f.report.converged());
  double ols_obj = 0.0;
  for (Index i = 0; i < 3; ++i) {
    const Vector ols = d.task(i).design.colPivHouseholderQr().solve(d.task(i).response);
    ols_obj += (d.task(i).response - d.task(i).design * ols).squaredNorm();
  }
  EXPECT_NEAR(ring::objective(f.coef, d, 0.0), ols_obj, 1e-8 * (1 + ols_obj));
}

TEST(Ring, ScalarExample) {
  const MultiTaskDataset d(std::vector<Task>{Task{Matrix::Ones(2, 1), Vector::Ones(2)}});
  const ring::Fit f = ring::fit(d, with_lambda(1.0));
  EXPECT_NEAR(f.coef(0, 0), 0.75, 1e-6);
}

TEST(Ring, MatchesProximalOracleAndCertifies) {
  for (int t = 0; t < 5; ++t) {
    const auto d = testutil::random_dataset(6, 4, 12, gen);
    const double lambda = (0.15 + 0.15 * t) * ring::zero_threshold(d);
    const ring::Fit f = ring::fit(d, with_lambda(lambda, static_cast<std::uint64_t>(t)));
    const double expect = oracle::ring_lasso(testutil::to_problem(d), lambda);
    const double got = ring::objective(f.coef, d, lambda);
    EXPECT_NEAR(got, expect, 1e-4 * expect);
    ASSERT_TRUE(f.report.converged());
    EXPECT_TRUE(ring::kkt_residuals(f.coef, d, lambda).certified(lambda));
  }
}

TEST(Ring, DominatingLambdaGivesZero) {
  const auto d = testutil::random_dataset(4, 3, 6, gen);
  const ring::Fit f = ring::fit(d, with_lambda(10.0 * ring::zero_threshold(d)));
  EXPECT_LT(f.coef.norm(), 1e-4);
}

TEST(Ring, ReportInvariants) {
  const auto d = testutil::random_dataset(5, 4, 9, gen);
  const double lambda = 0.3 * ring::zero_threshold(d);
  const ring::Fit f = ring::fit(d, with_lambda(lambda));
  const auto& tr = f.report.objective_trace;
  ASSERT_FALSE(tr.empty());
  for (double v : tr) EXPECT_TRUE(std::isfinite(v));
  EXPECT_LE(ring::objective(f.coef, d, lambda), tr.front());
  EXPECT_LE(f.report.max_accumulation_drift, 1e-6);
  EXPECT_EQ(f.report.rank_trace.size(), f.report.lambda_trace.size());
}

TEST(Ring, RotationEquivariance) {
  const auto d = testutil::random_dataset(4, 3, 10, gen);
  const Matrix u = testutil::random_orthogonal(3, gen);
  const double lambda = 0.3 * ring::zero_threshold(d);
  const ring::Fit a = ring::fit(d, with_lambda(lambda, 5));
  const ring::Fit b = ring::fit(rotate(d, u), with_lambda(lambda, 5));
  EXPECT_LE((b.coef - u.transpose() * a.coef).norm(), 1e-5);
}

TEST(Ring, GroupLassoInSingularBasisMatches) {
  const auto d = testutil::random_dataset(5, 4, 12, gen);
  const double lambda = 0.3 * ring::zero_threshold(d);
  const ring::Fit f = ring::fit(d, with_lambda(lambda));
  const spectra::Svd s = spectra::svd(f.coef);
  const Matrix u = spectra::complete_orthonormal(s.left);
  group::Options go;
  go.lambda = lambda;
  go.tol = 1e-14;
  go.max_sweeps = 20000;
  const auto rotated = rotate(d, u);
  const group::Fit g = group::fit(rotated, go);
  const double ring_obj = ring::objective(f.coef, d, lambda);
  EXPECT_NEAR(group::objective(g.coef, rotated, lambda), ring_obj, 1e-4 * ring_obj);
}

TEST(Ring, TunedFitMovesLambdaTowardTargetRank) {
  simgen::SimConfig c;
  c.n = 12;
  c.p = 12;
  c.m = 20;
  c.seed = 4;
  const auto sim = simgen::gen_decay(c);
  ring::Options o;
  o.target_rank = 3;
  o.zero_tol = 1e-2;
  o.max_passes = 200;
  o.lambda = simgen::default_start_lambda(sim.data);
  const ring::Fit f = ring::fit(sim.data, o);
  EXPECT_EQ(f.report.lambda_trace.size(), f.report.objective_trace.size());
  EXPECT_NEAR(f.report.coordinate_count_trace.back(), 3.0, 2.0);
  EXPECT_GT(f.report.final_lambda, 0.0);
}

TEST(RingKkt, Examples) {
  const auto d = testutil::random_dataset(3, 3, 10, gen);
  Matrix ols(3, 3);
  for (Index i = 0; i < 3; ++i) ols.col(i) = d.task(i).design.colPivHouseholderQr().solve(d.task(i).response);
  const auto k0 = ring::kkt_residuals(ols, d, 0.0);
  EXPECT_LE(k0.max_active(), 1e-8);
  const double lambda = 1.01 * ring::zero_threshold(d);
  const auto kz = ring::kkt_residuals(Matrix::Zero(3, 3), d, lambda);
  EXPECT_EQ(kz.active_rank, 0);
  EXPECT_LT(kz.max_inactive(), 0.0);
  EXPECT_TRUE(kz.certified(lambda));
  const auto kbad = ring::kkt_residuals(Matrix::Zero(3, 3), d, 0.9 * ring::zero_threshold(d));
  EXPECT_GT(kbad.max_inactive(), 0.0);
}

TEST(RingKkt, RejectsPerturbedOptimum) {
  const auto d = testutil::random_dataset(4, 3, 10, gen);
  const double lambda = 0.3 * ring::zero_threshold(d);
  const ring::Fit f = ring::fit(d, with_lambda(lambda));
  ASSERT_TRUE(ring::kkt_residuals(f.coef, d, lambda).certified(lambda));
  EXPECT_FALSE(ring::kkt_residuals(f.coef * 1.05, d, lambda).certified(lambda));
}

TEST(RankPath, NonincreasingToZero) {
  const auto d = testutil::random_dataset(6, 5, 10, gen);
  const double zt = ring::zero_threshold(d);
  const auto path = ring::rank_path(d, {0.05 * zt, 0.2 * zt, 0.5 * zt, 1.1 * zt});
  ASSERT_EQ(path.size(), 4u);
  for (std::size_t k = 1; k < path.size(); ++k) EXPECT_LE(path[k].rank, path[k - 1].rank);
  EXPECT_EQ(path.back().rank, 0);
}

TEST(RankPath, OlsRankIsGeneric) {
  const auto d = testutil::random_dataset(5, 3, 8, gen);
  const auto path = ring::rank_path(d, {0.0, 1e-3});
  EXPECT_EQ(path.front().rank, 3);
}

TEST(NumericalRank, Basics) {
  EXPECT_EQ(ring::numerical_rank(Matrix::Zero(3, 3)), 0);
  EXPECT_EQ(ring::numerical_rank(Matrix::Identity(3, 3)), 3);
  const Vector u = gaussian(4, 1, gen), v = gaussian(5, 1, gen);
  EXPECT_EQ(ring::numerical_rank(u * v.transpose()), 1);
}
