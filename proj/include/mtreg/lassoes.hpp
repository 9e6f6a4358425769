#pragma once

#include <optional>
#include <vector>

#include "mtreg/model.hpp"
#include "mtreg/report.hpp"

namespace mtreg::lassoes {

/// Which l1 norm carries the power: ||(-1, beta)||_1 = 1 + ||beta||_1 or ||beta||_1.
enum class NormMode { Augmented, Plain };

const char* to_string(NormMode mode);
NormMode norm_mode_from_string(const std::string& s);

/// Per-task penalty lambda * N(beta_i)^alpha, alpha >= 1, shared lambda.
struct Options {
  double alpha = 1.0;
  double lambda = 0.0;
  NormMode norm_mode = NormMode::Augmented;
  Index max_outer = 100;
  Index max_inner = 10000;
  double tol = 1e-9;
  int threads = 1;
};

void validate(const Options& opts);

struct Fit {
  CoefMatrix coef;
  FitReport report;
};

/// N(beta) under the chosen mode.
double task_norm(const Vector& beta, NormMode mode);

/// sum_i ||y_i - X_i beta_i||^2 + lambda N(beta_i)^alpha.
double objective(const CoefMatrix& b, const MultiTaskDataset& data, const Options& opts);

/// Fit all tasks. Each task alternates a cyclic coordinate-descent lasso with
/// the l1 weight frozen at w = lambda * alpha * N^{alpha-1}; the weight update
/// is safeguarded by a bracket on the scalar fixed point w = g(w), which is
/// the first-order condition of the convex task objective.
Fit fit(const MultiTaskDataset& data, const Options& opts, const CoefMatrix* warm_start = nullptr);

/// Per-task l_inf distance from 0 to the subdifferential of the task objective.
std::vector<double> kkt_residual(const CoefMatrix& b, const MultiTaskDataset& data, const Options& opts);

struct PathPoint {
  double lambda;
  double mean_sq_l1;  // n^{-1} sum_i ||beta_i||_1^2
  double curve;       // lambda^{-2/alpha}
};

struct LambdaSelection {
  double lambda = 0.0;
  Index index = 0;           // position of the chosen lambda in the grid
  bool no_crossing = false;  // g stayed below the curve; smallest lambda returned
  std::vector<PathPoint> path;
  CoefMatrix coef;           // fit at the chosen lambda
};

/// Walk a strictly decreasing lambda grid (warm starts when `warm` is set) and
/// stop at the first lambda where n^{-1} sum ||beta_i||_1^2 >= lambda^{-2/alpha}.
/// Requires alpha > 2 and at least 3 grid points.
LambdaSelection select_lambda(const MultiTaskDataset& data, double alpha, const std::vector<double>& grid,
                              Options base = {}, bool warm = true);

/// `count` points from hi down to lo, equally spaced in log scale.
std::vector<double> geometric_grid(double hi, double lo, Index count);

}  // namespace mtreg::lassoes
