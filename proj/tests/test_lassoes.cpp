#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mtreg/errors.hpp"
#include "mtreg/lassoes.hpp"
#include "mtreg/simgen.hpp"

using namespace mtreg;
using testutil::gaussian;

namespace {

std::mt19937_64 gen(11);

MultiTaskDataset one_by_one() {
  return MultiTaskDataset(std::vector<Task>{Task{Matrix::Ones(2, 1), Vector::Ones(2)}});
}

lassoes::Options plain(double alpha, double lambda) {
  lassoes::Options o;
  o.alpha = alpha;
  o.lambda = lambda;
  o.norm_mode = lassoes::NormMode::Plain;
  return o;
}

}  // namespace

TEST(Lassoes, ScalarExamplesMatchGridOracle) {
  const MultiTaskDataset d = one_by_one();
  struct Case {
    double alpha, lambda, expect;
  };
  for (const Case c : {Case{1, 1, 0.75}, Case{1, 4, 0.0}, Case{2, 1, 2.0 / 3.0}}) {
    const lassoes::Fit f = lassoes::fit(d, plain(c.alpha, c.lambda));
    const auto obj = [&](double b) { return 2 * (1 - b) * (1 - b) + c.lambda * std::pow(std::abs(b), c.alpha); };
    const double grid = oracle::minimize_1d(obj, -2, 2);
    EXPECT_NEAR(grid, c.expect, 1e-6);
    EXPECT_NEAR(f.coef(0, 0), c.expect, 1e-6);
  }
}

TEST(Lassoes, ZeroLambdaIsLeastSquares) {
  const auto d = testutil::random_dataset(3, 4, 12, gen);
  const lassoes::Fit f = lassoes::fit(d, plain(1.0, 0.0));
  for (Index i = 0; i < 3; ++i) {
    const Vector ols = d.task(i).design.colPivHouseholderQr().solve(d.task(i).response);
    EXPECT_LE((f.coef.col(i) - ols).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(Lassoes, MatchesOracleOnRandomInstances) {
  for (int t = 0; t < 6; ++t) {
    const auto d = testutil::random_dataset(2, 3, 8, gen);
    const double alpha = 1.0 + 0.5 * (t % 4);
    const auto mode = t % 2 ? lassoes::NormMode::Plain : lassoes::NormMode::Augmented;
    lassoes::Options o;
    o.alpha = alpha;
    o.lambda = 2.0 + t;
    o.norm_mode = mode;
    const lassoes::Fit f = lassoes::fit(d, o);
    double expect = 0.0;
    for (Index i = 0; i < 2; ++i)
      expect += oracle::lassoes_task(d.task(i).design, d.task(i).response, o.lambda, alpha,
                                     mode == lassoes::NormMode::Plain ? 0.0 : 1.0);
    const double got = lassoes::objective(f.coef, d, o);
    EXPECT_LE(got, expect * (1 + 1e-4));
    EXPECT_NEAR(got, expect, 1e-4 * expect);
  }
}

TEST(Lassoes, ObjectiveTraceNonincreasing) {
  const auto d = testutil::random_dataset(3, 5, 10, gen);
  lassoes::Options o;
  o.alpha = 2.5;
  o.lambda = 3.0;
  const lassoes::Fit f = lassoes::fit(d, o);
  for (std::size_t k = 1; k < f.report.objective_trace.size(); ++k)
    EXPECT_LE(f.report.objective_trace[k], f.report.objective_trace[k - 1] + 1e-12 * (1 + f.report.objective_trace[k - 1]));
}

TEST(Lassoes, TaskPermutationEquivariance) {
  const auto d = testutil::random_dataset(4, 3, 9, gen);
  lassoes::Options o;
  o.alpha = 2.0;
  o.lambda = 2.0;
  const std::vector<Index> order{3, 1, 0, 2};
  const lassoes::Fit a = lassoes::fit(d, o);
  const lassoes::Fit b = lassoes::fit(d.permuted(order), o);
  for (Index k = 0; k < 4; ++k) EXPECT_LE((b.coef.col(k) - a.coef.col(order[static_cast<std::size_t>(k)])).norm(), 1e-10);
}

TEST(Lassoes, ThreadCountDoesNotChangeResult) {
  const auto d = testutil::random_dataset(5, 3, 9, gen);
  lassoes::Options o;
  o.alpha = 1.5;
  o.lambda = 1.0;
  const lassoes::Fit a = lassoes::fit(d, o);
  o.threads = 3;
  const lassoes::Fit b = lassoes::fit(d, o);
  EXPECT_EQ(a.coef, b.coef);
}

TEST(LassoesKkt, Examples) {
  const MultiTaskDataset d = one_by_one();
  const lassoes::Options o = plain(1.0, 1.0);
  EXPECT_LE(lassoes::kkt_residual(Matrix::Constant(1, 1, 0.75), d, o)[0], 1e-6);
  EXPECT_GT(lassoes::kkt_residual(Matrix::Constant(1, 1, 0.85), d, o)[0], 0.1);
  const auto r = testutil::random_dataset(2, 3, 10, gen);
  Matrix ols(3, 2);
  for (Index i = 0; i < 2; ++i) ols.col(i) = r.task(i).design.colPivHouseholderQr().solve(r.task(i).response);
  for (double v : lassoes::kkt_residual(ols, r, plain(1.0, 0.0))) EXPECT_LE(v, 1e-8);
}

TEST(LassoesKkt, FitIsStationary) {
  const auto d = testutil::random_dataset(3, 4, 10, gen);
  lassoes::Options o;
  o.alpha = 2.0;
  o.lambda = 1.5;
  const lassoes::Fit f = lassoes::fit(d, o);
  for (double v : lassoes::kkt_residual(f.coef, d, o)) EXPECT_LE(v, 1e-5);
}

TEST(Lassoes, InvalidOptions) {
  const MultiTaskDataset d = one_by_one();
  EXPECT_THROW(lassoes::fit(d, plain(0.5, 1.0)), Error);
  EXPECT_THROW(lassoes::fit(d, plain(1.0, -1.0)), Error);
}

TEST(SelectLambda, ZeroResponseHasNoCrossing) {
  std::vector<Task> tasks{Task{gaussian(5, 2, gen), Vector::Zero(5)}, Task{gaussian(5, 2, gen), Vector::Zero(5)}};
  const MultiTaskDataset d(tasks);
  const auto sel = lassoes::select_lambda(d, 3.0, lassoes::geometric_grid(100, 0.01, 8));
  EXPECT_TRUE(sel.no_crossing);
  for (const auto& pt : sel.path) EXPECT_EQ(pt.mean_sq_l1, 0.0);
}

TEST(SelectLambda, WarmMatchesColdAndPathIsMonotone) {
  simgen::SimConfig c;
  c.n = 20;
  c.p = 20;
  c.m = 25;
  c.seed = 1;
  const auto sim = simgen::gen_decay(c);
  const auto grid = lassoes::geometric_grid(500.0, 0.05, 12);
  const auto warm = lassoes::select_lambda(sim.data, 3.0, grid, {}, true);
  const auto cold = lassoes::select_lambda(sim.data, 3.0, grid, {}, false);
  EXPECT_EQ(warm.index, cold.index);
  EXPECT_FALSE(warm.no_crossing);
  for (std::size_t k = 1; k < warm.path.size(); ++k)
    EXPECT_GE(warm.path[k].mean_sq_l1, warm.path[k - 1].mean_sq_l1 * (1 - 1e-9) - 1e-12);
}

TEST(SelectLambda, RejectsBadGrid) {
  const MultiTaskDataset d = one_by_one();
  EXPECT_THROW(lassoes::select_lambda(d, 2.0, {3, 2, 1}), Error);
  EXPECT_THROW(lassoes::select_lambda(d, 3.0, {3, 2}), Error);
  EXPECT_THROW(lassoes::select_lambda(d, 3.0, {1, 2, 3}), Error);
}
