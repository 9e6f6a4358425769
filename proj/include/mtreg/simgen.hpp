#pragma once

#include <cstdint>
#include <vector>

#include "mtreg/model.hpp"
#include "mtreg/ring.hpp"

namespace mtreg::simgen {

struct SimConfig {
  Index n = 150;
  Index p = 150;
  Index m = 300;
  double decay_rate = 0.4;   // Var(beta_ij) = exp(-decay_rate * (j + index_origin))
  int index_origin = 0;      // 0 or 1
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Simulation {
  MultiTaskDataset data;
  PopTruth truth;
};

/// Decaying-variance design: beta_ij ~ N(0, exp(-decay_rate (j + origin))),
/// X entries iid N(0,1), y = X beta + sigma * N(0,1).
/// Stream 0 draws the coefficients, stream 1 + i draws task i.
Simulation gen_decay(const SimConfig& cfg);

/// S / (1 + S) with S = sum_j exp(-decay_rate (j + origin)), at unit noise.
double theoretical_r2(Index p, double decay_rate, int index_origin, double noise_sigma = 1.0);

/// 1 - sum of squared noise / sum y^2 pooled over all rows.
double empirical_r2(const Simulation& sim);

struct PriorDraw {
  CoefMatrix coef;  // p x n
  Vector radii;     // r_1..r_p
  Matrix gamma;     // n x p, column j has norm r_j
  Matrix basis;     // p x p orthonormal frame chi
};

/// r_j ~ Gamma(n, rate lambda); gamma_.j uniform on the radius-r_j sphere;
/// chi from an orthonormalized Gaussian frame; beta_i = sum_j gamma_ij chi_j.
PriorDraw sample_ring_prior(Index n, Index p, double lambda, std::uint64_t seed);

struct Metrics {
  double l_par = 0.0;
  double l_pre = 0.0;
};

/// L_par = sum ||bhat_i - b_i||_inf / sum ||b_i||_inf,
/// L_pre = sum ||X_i(bhat_i - b_i)||_inf / sum ||X_i b_i||_inf.
/// Throws UndefinedMetric when a denominator is zero.
Metrics compute_metrics(const CoefMatrix& truth, const CoefMatrix& estimate, const MultiTaskDataset& data);

struct Table1Options {
  SimConfig base;                       // n, p, decay, noise and seed; m is overridden
  std::vector<Index> m_values{5, 25, 100};
  Index replicates = 5;
  ring::Options ring;                   // target_rank set => lambda tuning
  int threads = 1;
};

struct ReplicateResult {
  Index m = 0;
  Index replicate = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
  double final_lambda = 0.0;
  Index rank = 0;
  Index coordinate_count = 0;
  Index passes = 0;
  bool converged = false;
};

struct Table1Row {
  Index m = 0;
  Index replicates = 0;
  double l_par_mean = 0.0, l_par_sd = 0.0;
  double l_pre_mean = 0.0, l_pre_sd = 0.0;
};

struct Table1 {
  std::vector<Table1Row> rows;
  std::vector<ReplicateResult> replicates;
};

/// Starting lambda for tuned fits: spectral norm of (X_i^T y_i).
double default_start_lambda(const MultiTaskDataset& data);

/// For each m and replicate r: generate with seed base.seed + r, fit RING, score.
/// Replicates run in parallel; results are ordered by (m, replicate).
Table1 run_table1(const Table1Options& opts);

/// Default RING settings used by the table reproduction.
ring::Options table1_ring_defaults();

}  // namespace mtreg::simgen
