#include "mtreg/simgen.hpp"

#include <cmath>

#include "mtreg/errors.hpp"
#include "mtreg/parallel.hpp"
#include "mtreg/rng.hpp"

namespace mtreg::simgen {

void SimConfig::validate() const {
  require(n >= 1 && p >= 1 && m >= 1, ErrorCode::InvalidArgument, "simulation: n, p, m must be >= 1");
  require(decay_rate > 0.0, ErrorCode::InvalidArgument, "simulation: decay_rate must be > 0");
  require(index_origin == 0 || index_origin == 1, ErrorCode::InvalidArgument, "simulation: index_origin is 0 or 1");
  require(noise_sigma >= 0.0, ErrorCode::InvalidArgument, "simulation: noise_sigma must be >= 0");
}

Simulation gen_decay(const SimConfig& cfg) {
  cfg.validate();
  CoefMatrix beta(cfg.p, cfg.n);
  {
    RandomStream rng(cfg.seed, 0);
    for (Index i = 0; i < cfg.n; ++i) {
      for (Index j = 0; j < cfg.p; ++j) {
        const double sd = std::exp(-0.5 * cfg.decay_rate * static_cast<double>(j + cfg.index_origin));
        beta(j, i) = sd * rng.normal();
      }
    }
  }
  std::vector<Task> tasks(static_cast<std::size_t>(cfg.n));
  for (Index i = 0; i < cfg.n; ++i) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(i) + 1);
    Task& t = tasks[static_cast<std::size_t>(i)];
    t.design.resize(cfg.m, cfg.p);
    for (Index r = 0; r < cfg.m; ++r)
      for (Index l = 0; l < cfg.p; ++l) t.design(r, l) = rng.normal();
    t.response = t.design * beta.col(i);
    for (Index r = 0; r < cfg.m; ++r) t.response(r) += cfg.noise_sigma * rng.normal();
  }

  PopTruth truth;
  truth.true_coef = beta;
  truth.sigma = cfg.noise_sigma;
  for (Index i = 0; i < cfg.n; ++i) {
    const Vector b = beta.col(i);
    Matrix cov = Matrix::Identity(cfg.p + 1, cfg.p + 1);
    cov(0, 0) = b.squaredNorm() + cfg.noise_sigma * cfg.noise_sigma;
    cov.block(1, 0, cfg.p, 1) = b;
    cov.block(0, 1, 1, cfg.p) = b.transpose();
    truth.pop_cov.push_back(std::move(cov));
  }
  return {MultiTaskDataset(std::move(tasks)), std::move(truth)};
}

double theoretical_r2(Index p, double decay_rate, int index_origin, double noise_sigma) {
  double s = 0.0;
  for (Index j = 0; j < p; ++j) s += std::exp(-decay_rate * static_cast<double>(j + index_origin));
  return s / (s + noise_sigma * noise_sigma);
}

double empirical_r2(const Simulation& sim) {
  double noise = 0.0, total = 0.0;
  for (Index i = 0; i < sim.data.num_tasks(); ++i) {
    const Task& t = sim.data.task(i);
    noise += (t.response - t.design * sim.truth.true_coef.col(i)).squaredNorm();
    total += t.response.squaredNorm();
  }
  require(total > 0.0, ErrorCode::UndefinedMetric, "empirical_r2: responses are all zero");
  return 1.0 - noise / total;
}

PriorDraw sample_ring_prior(Index n, Index p, double lambda, std::uint64_t seed) {
  require(n >= 1 && p >= 1, ErrorCode::InvalidArgument, "ring prior: n and p must be >= 1");
  require(lambda > 0.0, ErrorCode::InvalidArgument, "ring prior: lambda must be > 0");
  RandomStream rng(seed, 0);
  PriorDraw out;
  out.radii.resize(p);
  out.gamma.resize(n, p);
  for (Index j = 0; j < p; ++j) {
    out.radii(j) = rng.gamma(static_cast<double>(n), lambda);
    Vector dir(n);
    double norm = 0.0;
    do {
      for (Index i = 0; i < n; ++i) dir(i) = rng.normal();
      norm = dir.norm();
    } while (norm == 0.0);
    out.gamma.col(j) = out.radii(j) * dir / norm;
  }
  Matrix frame(p, p);
  for (Index c = 0; c < p; ++c)
    for (Index r = 0; r < p; ++r) frame(r, c) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(frame);
  out.basis = qr.householderQ() * Matrix::Identity(p, p);
  out.coef = out.basis * out.gamma.transpose();
  return out;
}

Metrics compute_metrics(const CoefMatrix& truth, const CoefMatrix& estimate, const MultiTaskDataset& data) {
  require_shape(truth, data, "compute_metrics truth");
  require_shape(estimate, data, "compute_metrics estimate");
  double par_num = 0.0, par_den = 0.0, pre_num = 0.0, pre_den = 0.0;
  for (Index i = 0; i < data.num_tasks(); ++i) {
    const Vector diff = estimate.col(i) - truth.col(i);
    const Matrix& x = data.task(i).design;
    par_num += diff.lpNorm<Eigen::Infinity>();
    par_den += truth.col(i).lpNorm<Eigen::Infinity>();
    if (x.rows() > 0) {
      pre_num += (x * diff).lpNorm<Eigen::Infinity>();
      pre_den += (x * truth.col(i)).lpNorm<Eigen::Infinity>();
    }
  }
  require(par_den > 0.0, ErrorCode::UndefinedMetric, "L_par: true coefficients are all zero");
  require(pre_den > 0.0, ErrorCode::UndefinedMetric, "L_pre: true fitted values are all zero");
  return {par_num / par_den, pre_num / pre_den};
}

double default_start_lambda(const MultiTaskDataset& data) {
  return 0.5 * ring::zero_threshold(data);
}

ring::Options table1_ring_defaults() {
  ring::Options o;
  o.target_rank = 10;
  o.zero_tol = 1e-2;
  o.max_passes = 300;
  o.tol = 1e-6;
  return o;
}

Table1 run_table1(const Table1Options& opts) {
  opts.base.validate();
  require(opts.replicates >= 1, ErrorCode::InvalidArgument, "run_table1: replicates must be >= 1");
  require(!opts.m_values.empty(), ErrorCode::InvalidArgument, "run_table1: no m values");
  ring::validate([&] {
    ring::Options probe = opts.ring;
    if (probe.target_rank && probe.lambda <= 0.0) probe.lambda = 1.0;
    return probe;
  }());

  const auto n_m = static_cast<long>(opts.m_values.size());
  const long total = n_m * static_cast<long>(opts.replicates);
  Table1 out;
  out.replicates.resize(static_cast<std::size_t>(total));
  parallel_for(total, opts.threads, [&](long job) {
    const Index m = opts.m_values[static_cast<std::size_t>(job / opts.replicates)];
    const Index rep = job % opts.replicates;
    SimConfig cfg = opts.base;
    cfg.m = m;
    cfg.seed = opts.base.seed + static_cast<std::uint64_t>(rep);
    const Simulation sim = gen_decay(cfg);
    ring::Options ro = opts.ring;
    ro.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(m));
    if (ro.lambda <= 0.0) ro.lambda = default_start_lambda(sim.data);
    const ring::Fit fit = ring::fit(sim.data, ro);
    ReplicateResult& r = out.replicates[static_cast<std::size_t>(job)];
    r.m = m;
    r.replicate = rep;
    r.seed = cfg.seed;
    r.metrics = compute_metrics(sim.truth.true_coef, fit.coef, sim.data);
    r.final_lambda = fit.report.final_lambda;
    r.rank = ring::numerical_rank(fit.coef);
    r.coordinate_count = fit.report.coordinate_count_trace.back();
    r.passes = fit.report.passes;
    r.converged = fit.report.converged();
  });

  for (long k = 0; k < n_m; ++k) {
    Table1Row row;
    row.m = opts.m_values[static_cast<std::size_t>(k)];
    row.replicates = opts.replicates;
    const double count = static_cast<double>(opts.replicates);
    for (Index r = 0; r < opts.replicates; ++r) {
      const Metrics& mt = out.replicates[static_cast<std::size_t>(k * opts.replicates + r)].metrics;
      row.l_par_mean += mt.l_par / count;
      row.l_pre_mean += mt.l_pre / count;
    }
    if (opts.replicates > 1) {
      for (Index r = 0; r < opts.replicates; ++r) {
        const Metrics& mt = out.replicates[static_cast<std::size_t>(k * opts.replicates + r)].metrics;
        row.l_par_sd += (mt.l_par - row.l_par_mean) * (mt.l_par - row.l_par_mean);
        row.l_pre_sd += (mt.l_pre - row.l_pre_mean) * (mt.l_pre - row.l_pre_mean);
      }
      row.l_par_sd = std::sqrt(row.l_par_sd / (count - 1.0));
      row.l_pre_sd = std::sqrt(row.l_pre_sd / (count - 1.0));
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace mtreg::simgen
