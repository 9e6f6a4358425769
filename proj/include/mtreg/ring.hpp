#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtreg/model.hpp"
#include "mtreg/report.hpp"

namespace mtreg::ring {

// Objective: sum_ij (y_ij - x_ij^T beta_i)^2 + lambda * |||B|||_1.
//
// Stationarity (full-rank case) reads -2R + lambda (B B^T)^{-1/2} B = 0 with
// R = (X_1^T r_1, ..., X_n^T r_n); the solver and the certificate both use the
// lambda/2 scaling that follows from it.

struct Options {
  double lambda = 0.0;
  double gamma = 0.5;        // relaxation of each task update, (0, 1]
  double zero_tol = 1e-6;    // eps in the coordinate count used by lambda tuning
  std::optional<Index> target_rank;
  double lambda_factor = 1.1;
  Index svd_refresh_every = 10;
  double init_scale = 1e-3;
  Index max_passes = 500;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  /// Drop trailing singular directions left at the regularization floor when
  /// that does not increase the objective.
  bool truncate_floor_directions = true;
  /// The floor added to A starts at smoothing_start * trace(A)/p and shrinks by
  /// smoothing_decay whenever a pass moves no coefficient by more than
  /// smoothing_settle * sqrt(floor), until it reaches 1e-10 * trace(A)/p.
  double smoothing_start = 1.0;
  double smoothing_decay = 0.1;
  double smoothing_settle = 1.0;
  /// Fixed-lambda fits finish with alternating ridge on balanced factors at
  /// the identified rank (skipped when p * rank exceeds 1600).
  bool polish = true;
};

void validate(const Options& opts);

struct Report {
  std::vector<double> objective_trace;      // per pass, at that pass's lambda
  std::vector<Index> rank_trace;            // numerical rank (1e-6 relative) per pass
  std::vector<Index> coordinate_count_trace;  // #{l : n^{-1} sum_i beta_il^2 > eps} per pass
  std::vector<Index> singular_count_trace;    // #{k : n^{-1} alpha_k^2 > eps} per pass
  std::vector<double> lambda_trace;
  double final_lambda = 0.0;
  std::vector<double> kkt_active;
  std::vector<double> kkt_inactive;
  Index passes = 0;
  Index best_pass = 0;           // 0 is the initial iterate
  Index truncated_directions = 0;
  double final_smoothing = 0.0;  // relative floor in force at the last pass
  Index polish_iterations = 0;
  double max_accumulation_drift = 0.0;  // max ||A - B B^T||_F / (1 + ||A||_F) seen before refreshes
  Termination termination = Termination::Converged;

  bool converged() const { return termination == Termination::Converged; }
};

struct Fit {
  CoefMatrix coef;
  Report report;
};

double objective(const CoefMatrix& b, const MultiTaskDataset& data, double lambda);

/// Regularized accumulation matrix A + max(1e-10 trace(A)/p, 1e-12) I.
Matrix regularize_accumulation(const Matrix& a);

/// Adaptive-ridge direction: solves
///   (X^T X + (lambda/2) A^{+1/2}) delta = X^T residual - (lambda/2) A^{+1/2} beta
/// with A regularized first. With beta = 0 (default) this is the plain ridge
/// step (X^T X + (lambda/2) A^{+1/2})^{-1} X^T residual. Throws SingularRidge.
Vector ridge_step(const Matrix& x, const Vector& residual, const Matrix& a, double lambda,
                  const Vector* beta = nullptr);

/// Iterative adaptive-ridge fit with rank-one accumulation updates, periodic
/// re-decomposition and optional lambda tuning toward target_rank.
/// Fixed-lambda fits return the iterate with the lowest objective; tuned fits
/// return the final iterate.
Fit fit(const MultiTaskDataset& data, const Options& opts, const CoefMatrix* warm_start = nullptr);

struct KktResiduals {
  Index active_rank = 0;
  /// Per active singular triple, max(||R^T u_k - (lambda/2) v_k||, ||R v_k - (lambda/2) u_k||).
  std::vector<double> active;
  std::vector<double> inactive;  // singular values of (I - U U^T) R minus lambda/2
  double r_frobenius = 0.0;

  double max_active() const;
  double max_inactive() const;  // -inf when there is no inactive direction
  /// active <= rel_tol * (1 + ||R||_F) and inactive <= rel_tol * lambda.
  bool certified(double lambda, double rel_tol = 1e-4) const;
};

/// Singular directions with sigma > rank_rel_tol * sigma_max are treated as active.
KktResiduals kkt_residuals(const CoefMatrix& b, const MultiTaskDataset& data, double lambda,
                           double rank_rel_tol = 1e-6);

/// lambda above which B = 0 is optimal: 2 * spectral norm of (X_i^T y_i).
double zero_threshold(const MultiTaskDataset& data);

struct RankPathPoint {
  double lambda;
  Index rank;
  double objective;
  bool converged;
};

/// Warm-started fits along an increasing grid; rank at 1e-6 of the top singular value.
std::vector<RankPathPoint> rank_path(const MultiTaskDataset& data, const std::vector<double>& lambda_grid,
                                     Options opts = {});

/// Number of singular values above rel_tol * sigma_max (0 for a zero matrix).
Index numerical_rank(const Matrix& b, double rel_tol = 1e-6);

}  // namespace mtreg::ring
