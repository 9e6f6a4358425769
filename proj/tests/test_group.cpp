#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mtreg/group.hpp"

using namespace mtreg;
using testutil::gaussian;

namespace {

std::mt19937_64 gen(23);

MultiTaskDataset two_unit_tasks() {
  return MultiTaskDataset(std::vector<Task>{Task{Matrix::Ones(1, 1), Vector::Ones(1)}, Task{Matrix::Ones(1, 1), Vector::Ones(1)}});
}

group::Options with_lambda(double lambda) {
  group::Options o;
  o.lambda = lambda;
  return o;
}

}  // namespace

TEST(Group, SymmetricExample) {
  const group::Fit f = group::fit(two_unit_tasks(), with_lambda(1.0));
  const double expect = 1.0 - 1.0 / (2.0 * std::sqrt(2.0));
  // Independent check: minimize 2 (1-b)^2 + sqrt(2) |b| over b on a grid.
  const double grid = oracle::minimize_1d([](double b) { return 2 * (1 - b) * (1 - b) + std::sqrt(2.0) * std::abs(b); }, -2, 2);
  EXPECT_NEAR(grid, expect, 1e-6);
  EXPECT_NEAR(f.coef(0, 0), expect, 1e-6);
  EXPECT_NEAR(f.coef(0, 1), expect, 1e-6);
  Matrix pg;
  oracle::group_lasso(testutil::to_problem(two_unit_tasks()), 1.0, 20000, &pg);
  EXPECT_NEAR(pg(0, 0), expect, 1e-6);
}

TEST(Group, ZeroLambdaIsLeastSquares) {
  const auto d = testutil::random_dataset(3, 4, 12, gen);
  const group::Fit f = group::fit(d, with_lambda(0.0));
  for (Index i = 0; i < 3; ++i) {
    const Vector ols = d.task(i).design.colPivHouseholderQr().solve(d.task(i).response);
    EXPECT_LE((f.coef.col(i) - ols).lpNorm<Eigen::Infinity>(), 1e-7);
  }
}

TEST(Group, MatchesProximalOracle) {
  for (int t = 0; t < 6; ++t) {
    const auto d = testutil::random_dataset(2 + t % 3, 3, 8, gen);
    const double lambda = 3.0 + 2.0 * t;
    const group::Fit f = group::fit(d, with_lambda(lambda));
    const double expect = oracle::group_lasso(testutil::to_problem(d), lambda);
    const double got = group::objective(f.coef, d, lambda);
    EXPECT_NEAR(got, expect, 1e-6 * expect);
  }
}

TEST(Group, SweepObjectiveNonincreasingAndRowPattern) {
  const auto d = testutil::random_dataset(4, 6, 10, gen);
  const group::Fit f = group::fit(d, with_lambda(12.0));
  const auto& tr = f.report.objective_trace;
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr[k], tr[k - 1] + 1e-12 * (1 + tr[k - 1]));
  for (Index l = 0; l < 6; ++l) {
    const Index nz = (f.coef.row(l).array() != 0.0).count();
    EXPECT_TRUE(nz == 0 || nz == 4) << "row " << l;
  }
}

TEST(Group, FixedPointOfNonzeroRows) {
  const auto d = testutil::random_dataset(3, 4, 10, gen);
  const double lambda = 6.0;
  group::Options o = with_lambda(lambda);
  o.tol = 1e-14;
  const group::Fit f = group::fit(d, o);
  for (Index l = 0; l < 4; ++l) {
    const double norm = f.coef.row(l).norm();
    if (norm == 0.0) continue;
    const double mu = lambda / (2.0 * norm);
    for (Index i = 0; i < 3; ++i) {
      const Matrix& x = d.task(i).design;
      const Vector partial = d.task(i).response - x * f.coef.col(i) + x.col(l) * f.coef(l, i);
      const double a = x.col(l).dot(partial), e = x.col(l).squaredNorm();
      EXPECT_NEAR(f.coef(l, i), a / (mu + e), 1e-8);
    }
  }
}

TEST(LambdaStar, Examples) {
  EXPECT_FALSE(group::lambda_star(Vector::Zero(3), Vector::Ones(3), 1.0).has_value());
  // Symmetric case: (lambda/2)^2 = n (mu a / (mu + e))^2, so mu = e c / (a - c) with c = lambda / (2 sqrt n).
  Vector a = Vector::Ones(2), e = Vector::Ones(2);
  const auto mu = group::lambda_star(a, e, 1.0);
  ASSERT_TRUE(mu.has_value());
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  EXPECT_NEAR(*mu, c / (1.0 - c), 1e-10);
  EXPECT_NEAR(1.0 / (*mu + 1.0), 1.0 - c, 1e-10);
}

TEST(LambdaStar, SubstitutionResidual) {
  for (int t = 0; t < 20; ++t) {
    const Vector a = 5.0 * gaussian(4, 1, gen);
    const Vector e = gaussian(4, 1, gen).cwiseAbs().array() + 0.1;
    const double lambda = 0.5 * 2.0 * a.norm();
    const auto mu = group::lambda_star(a, e, lambda);
    ASSERT_TRUE(mu.has_value());
    EXPECT_NEAR(group::multiplier_rhs(a, e, *mu), 0.25 * lambda * lambda, 1e-9 * lambda * lambda);
  }
}

TEST(ZeroCertificate, Examples) {
  std::vector<Task> zero{Task{gaussian(4, 3, gen), Vector::Zero(4)}};
  const auto z = group::zero_certificate(MultiTaskDataset(zero), 2.0);
  EXPECT_TRUE(z.holds);
  for (double m : z.raw_margins) EXPECT_EQ(m, 4.0);

  const auto tiny = group::zero_certificate(two_unit_tasks(), 2.0);
  EXPECT_NEAR(tiny.raw_margins[0], 4.0 - 2.0, 1e-15);
  EXPECT_NEAR(tiny.rescaled_margins[0], 1.0 - 2.0, 1e-15);
  EXPECT_FALSE(tiny.holds);
  const double big = 2.0 * std::sqrt(2.0) * 1.01;
  EXPECT_TRUE(group::zero_certificate(two_unit_tasks(), big).holds);
  EXPECT_EQ(group::fit(two_unit_tasks(), with_lambda(big)).coef.norm(), 0.0);
}

TEST(ZeroCertificate, ImpliesZeroFit) {
  const auto d = testutil::random_dataset(3, 4, 8, gen);
  double max_row = 0.0;
  for (Index l = 0; l < 4; ++l) {
    double s = 0.0;
    for (Index i = 0; i < 3; ++i) s += std::pow(d.task(i).design.col(l).dot(d.task(i).response), 2);
    max_row = std::max(max_row, std::sqrt(s));
  }
  const double lambda = 2.0 * 2.0 * max_row;
  EXPECT_TRUE(group::zero_certificate(d, lambda).holds);
  EXPECT_EQ(group::fit(d, with_lambda(lambda)).coef.norm(), 0.0);
}

TEST(GroupKkt, FitIsStationary) {
  const auto d = testutil::random_dataset(3, 5, 10, gen);
  group::Options o = with_lambda(8.0);
  o.tol = 1e-13;
  const group::Fit f = group::fit(d, o);
  for (double v : group::kkt_residuals(f.coef, d, 8.0)) EXPECT_LE(v, 1e-5);
}
