#pragma once

#include <optional>
#include <vector>

#include "mtreg/model.hpp"
#include "mtreg/report.hpp"

namespace mtreg::group {

// Objective: sum_ij (y_ij - x_ij^T beta_i)^2 + lambda * sum_l ||b_l||_2.
//
// Stationarity for row l keeps the factor 2 of the squared loss:
//   -2 sum_j x_ijl (Y~_ijl - b_li x_ijl) + lambda b_li / ||b_l|| = 0,
// so b_li = a_i / (mu + e_i) with mu = lambda / (2 ||b_l||), and mu solves
//   (lambda / 2)^2 = sum_i (mu a_i / (mu + e_i))^2,
// where a_i = sum_j x_ijl Y~_ijl and e_i = sum_j x_ijl^2.

struct Options {
  double lambda = 0.0;
  Index max_sweeps = 1000;
  double tol = 1e-9;
};

void validate(const Options& opts);

struct Fit {
  CoefMatrix coef;
  FitReport report;
};

double objective(const CoefMatrix& b, const MultiTaskDataset& data, double lambda);

/// Block coordinate descent over rows in natural order.
Fit fit(const MultiTaskDataset& data, const Options& opts, const CoefMatrix* warm_start = nullptr);

/// Root mu of (lambda/2)^2 = sum_i (mu a_i / (mu + e_i))^2 by bracketed bisection
/// (relative tolerance 1e-12). Empty when the block is zero, i.e. when
/// sum_i a_i^2 <= (lambda/2)^2. Requires lambda > 0.
std::optional<double> lambda_star(const Vector& inner, const Vector& energy, double lambda);

/// Right-hand side of the multiplier equation, exposed for substitution checks.
double multiplier_rhs(const Vector& inner, const Vector& energy, double mu);

struct ZeroCertificate {
  bool holds = false;                   // every rescaled margin is positive
  std::vector<double> raw_margins;      // lambda^2 - sum_i (x_il^T y_i)^2
  std::vector<double> rescaled_margins; // (lambda/2)^2 - sum_i (x_il^T y_i)^2
};

/// Certificate that B = 0 minimizes the objective.
ZeroCertificate zero_certificate(const MultiTaskDataset& data, double lambda);

/// Per-row distance from 0 to the block subdifferential.
std::vector<double> kkt_residuals(const CoefMatrix& b, const MultiTaskDataset& data, double lambda);

}  // namespace mtreg::group
