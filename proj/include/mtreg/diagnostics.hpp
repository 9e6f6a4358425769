#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtreg/model.hpp"

namespace mtreg::diagnostics {

enum class ReMethod { Enumeration, Sampled };
const char* to_string(ReMethod m);

struct REEstimate {
  Index s = 0;
  double c0 = 0.0;
  int q = 1;  // 1 or 2 for RE_q; 0 marks the subspace (RE2) variant
  double kappa = 0.0;
  bool certified = false;
  ReMethod method = ReMethod::Sampled;
  bool shared_support = true;  // every task uses the same J
  Index candidates = 0;        // supports or subspaces examined
  double restart_spread = 0.0; // relative gap between the two best restarts
};

struct ReOptions {
  Index restarts = 64;
  Index steps = 2000;
  Index sampled_supports = 256;  // used when p > 12
  std::uint64_t seed = 0;
  int threads = 1;
};

/// kappa = min ||X^T Delta||_2 / (sqrt(m) ||Delta_J||_2) over the cone
/// ||Delta_{J^c}||_{q,1} <= c0 ||Delta_J||_{q,1}, |J| <= s.
/// For q = 1 the cone norm is the entrywise l1 norm; for q = 2 it is the sum of
/// row (feature) l2 norms across tasks. Block i is normalized by its own row count.
REEstimate re_constant(const std::vector<Matrix>& x_blocks, Index s, double c0, int q, const ReOptions& opts = {});

struct Re2Options {
  Index samples = 500;
  Index steps = 200;
  std::uint64_t seed = 0;
};

/// Subspace version: minimum over dim(V) <= s and the nuclear-norm cone
/// |||(I - P_V) Delta|||_1 <= c0 |||P_V Delta|||_1. Heuristic, never certified.
REEstimate re2_constant(const std::vector<Matrix>& x_blocks, Index s, double c0 = 3.0,
                        const Re2Options& opts = {});

struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> parts;
  std::optional<double> observed;
  std::optional<bool> satisfied;
  bool outside_theorem = false;  // inputs violate a hypothesis; value is still evaluated
  std::string note;

  double part(const std::string& key) const;
  double input(const std::string& key) const;
  /// Compare `value` against part `key` (value <= bound).
  void check(const std::string& key, double value);
};

/// Right-hand side of the lassoes risk inequality:
///   n C_n + (lambda/m + delta) norms0 - (lambda/m - delta) norms_hat,
/// where C_n is the per-task average risk of the comparison vectors and the
/// norms are sums of squared l1 norms of augmented coefficients.
BoundReport bound_lassoes_theorem1(double c_big, double c_small, Index n, double lambda, double m, double delta,
                                   double norms0, double norms_hat);

/// Prediction (a) and l1 (b) bounds for the powered-l1 penalty.
/// Throws InvalidInputs for kappa <= 0. A <= sqrt(2) or lambda below the
/// prescribed minimum is flagged outside_theorem.
BoundReport bound_lassoL1p(double s, double kappa, double m, Index n, Index p, double sigma, double a_const,
                           double alpha, double lambda, double b_cap, double b_hat_cap);

/// Per-task support bound (c): ||X_i(beta_i - beta_hat_i)||^2 m phi_i / (lambda alpha ||beta_hat_i||_1^{alpha-1}/2 - A sigma sqrt(m log np))^2.
/// Throws InvalidInputs when the bracket is not positive.
BoundReport bound_lassoL1p_sparsity(double pred_err_sq, double m, double phi_i_max, double lambda, double alpha,
                                    double beta_hat_l1, double a_const, double sigma, Index n, Index p);

/// Bracket 1 + 3 C (b / sqrt(eta))^{(alpha-1)/(alpha-2)} and the three bounds it scales.
/// C is existential in the theory; 1 is only a conventional default.
/// Throws InvalidInputs for alpha <= 2, eta outside (0,1) or kappa <= 0.
BoundReport bound_L12merge2(double s, double kappa, Index n, double m, Index p, double sigma, double a_const,
                            double b, double eta, double alpha, double c_const, double phi_max, double delta);

/// Prediction, trace-norm and rank bounds with lambda = 4 sigma sqrt((A+1) m n p).
/// Throws InvalidInputs for kappa <= 0; A <= 1 is flagged outside_theorem.
BoundReport bound_ring(double s, Index p, Index n, double m, double sigma, double a_const, double kappa,
                       double phi_max);

/// lemma_a: sqrt(2 e V log(n (p+1)^2) / (m eta));
/// lemma_b: lemma_a (n + sum_l1_sq) / (n m);
/// theorem: (1/m + p b^2 / (n m)) sqrt(16 e V log(n p) / (m eta)).
/// Throws InvalidInputs for eta outside (0,1).
BoundReport bound_persistence(double v, Index n, Index p, double m, double eta, double b, double sum_l1_sq = 0.0);

struct DesignConstants {
  double phi_max = 0.0;        // max_i lambda_max(X_i^T X_i / m_i)
  double lambda_x = 0.0;       // max_l sqrt(sum_ij x_ijl^2)
  double tilde_lambda_x = 0.0; // max_i sqrt(sum_lj x_ijl^2)
  bool column_normalized = false;
};

DesignConstants design_constants(const MultiTaskDataset& data);

/// Design blocks of a dataset, in task order.
std::vector<Matrix> design_blocks(const MultiTaskDataset& data);

}  // namespace mtreg::diagnostics
