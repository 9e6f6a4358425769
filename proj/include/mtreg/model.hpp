#pragma once

#include <optional>
#include <vector>

#include "mtreg/spectra.hpp"

namespace mtreg {

using Index = Eigen::Index;

/// One regression problem: y = X beta + noise.
struct Task {
  Matrix design;   // m x p, rows are x_ij^T
  Vector response; // m
};

/// n tasks sharing the feature count p. Row counts may differ per task.
class MultiTaskDataset {
public:
  /// Validates shapes and finiteness; throws DimensionMismatch / NonFinite.
  explicit MultiTaskDataset(std::vector<Task> tasks);

  Index num_tasks() const { return static_cast<Index>(tasks_.size()); }
  Index num_features() const { return p_; }
  Index rows(Index i) const { return tasks_[static_cast<std::size_t>(i)].design.rows(); }
  Index total_rows() const;

  const Task& task(Index i) const { return tasks_[static_cast<std::size_t>(i)]; }
  const std::vector<Task>& tasks() const { return tasks_; }

  /// True when sum_j x_ijl^2 = m_i for every task and column, within tol (relative to m_i).
  bool is_column_normalized(double tol = 1e-8) const;

  /// Same tasks in a different order: task k of the result is task order[k] of this.
  MultiTaskDataset permuted(const std::vector<Index>& order) const;

private:
  std::vector<Task> tasks_;
  Index p_ = 0;
};

/// p x n coefficient matrix; column i is beta_i, row l is the cross-task vector b_l.
using CoefMatrix = Matrix;

/// (-1, beta^T)^T.
Vector augmented(const Vector& beta);

/// m^{-1} sum_j z_j z_j^T with z_j = (y_j, x_j^T)^T. Raw second moments unless
/// `center` is set, in which case the sample mean of z is removed first.
Matrix empirical_cov(const Task& task, bool center = false);

/// Sum over tasks and rows of (y_ij - x_ij^T beta_i)^2.
double empirical_risk(const CoefMatrix& b, const MultiTaskDataset& data);

/// Per-task residual vectors y_i - X_i beta_i.
std::vector<Vector> residuals(const CoefMatrix& b, const MultiTaskDataset& data);

/// R = (X_1^T r_1, ..., X_n^T r_n), the p x n matrix of residual correlations.
Matrix residual_correlations(const CoefMatrix& b, const MultiTaskDataset& data);

/// Ground-truth description of a simulated problem.
struct PopTruth {
  CoefMatrix true_coef;
  double sigma = 0.0;
  std::vector<Matrix> pop_cov;  // (p+1) x (p+1) second moments of (y, x)
  double moment_bound = 1.0;    // V

  void validate() const;
};

/// sum_i beta~_i^T Sigma~_i beta~_i.
double population_risk(const CoefMatrix& b, const PopTruth& truth);

/// max_i max-entry |S~_i - Sigma~_i|.
double sup_norm_gap(const MultiTaskDataset& data, const PopTruth& truth);

enum class Axis { Rows, Columns };

/// [sum_groups (sum_members |z|^p)^{q/p}]^{1/q}; groups are rows or columns of b.
double lpq_norm(const Matrix& b, double p_exp, double q_exp, Axis axis);

struct SparsitySummary {
  std::vector<std::vector<Index>> task_support;  // J_i
  std::vector<Index> task_count;                 // M(beta_i)
  std::vector<Index> row_support;                // J(B)
  Index rank = 0;
};

double default_sparsity_threshold(const CoefMatrix& b);

/// Entries with |value| <= threshold count as zero (default 1e-8 * max|B|).
/// Rank counts singular values above rank_rel_tol * largest singular value.
SparsitySummary sparsity_summary(const CoefMatrix& b, std::optional<double> threshold = std::nullopt,
                                 double rank_rel_tol = 1e-8);

void require_shape(const CoefMatrix& b, const MultiTaskDataset& data, const char* what);

}  // namespace mtreg
