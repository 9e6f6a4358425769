#include "mtreg/ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtreg/errors.hpp"
#include "mtreg/rng.hpp"

namespace mtreg::ring {

namespace {

constexpr double kFloorRel = 1e-10;
constexpr double kFloorAbs = 1e-12;
constexpr double kMinRcond = 1e-13;
constexpr double kRankRel = 1e-6;
constexpr double kTruncateFactor = 1e3;  // candidates: sigma <= factor * sqrt(floor)

double accumulation_floor(const Matrix& a, double rel = kFloorRel) {
  return std::max(rel * a.trace() / static_cast<double>(a.rows()), kFloorAbs);
}

Vector solve_spd(const Matrix& m, const Vector& rhs) {
  Eigen::LLT<Matrix> llt(m);
  require(llt.info() == Eigen::Success, ErrorCode::SingularRidge, "ridge system is not positive definite");
  const double rcond = llt.rcond();
  require(std::isfinite(rcond) && rcond >= kMinRcond, ErrorCode::SingularRidge,
          "ridge system is numerically singular");
  return llt.solve(rhs);
}

Index count_above(const Vector& values, double threshold) {
  return static_cast<Index>((values.array() > threshold).count());
}

// Repeatedly drop the smallest singular direction below the floor scale when
// doing so does not raise the objective.
Index truncate_floor_directions(CoefMatrix& b, const MultiTaskDataset& data, double lambda) {
  const Matrix a = b * b.transpose();
  const double threshold = kTruncateFactor * std::sqrt(accumulation_floor(a));
  const spectra::Svd s = spectra::svd(b);
  double best = objective(b, data, lambda);
  Index dropped = 0;
  CoefMatrix candidate = b;
  for (Index k = s.rank() - 1; k >= 0; --k) {
    if (s.singulars(k) > threshold) break;
    candidate.noalias() -= s.singulars(k) * s.left.col(k) * s.right.col(k).transpose();
    const double obj = objective(candidate, data, lambda);
    if (!(obj <= best)) break;
    best = obj;
    b = candidate;
    ++dropped;
  }
  if (dropped == s.rank()) b.setZero();
  return dropped;
}

struct Polish {
  CoefMatrix coef;
  Index iterations = 0;
  bool applied = false;
  bool converged = false;
};

constexpr Index kPolishMaxDim = 1600;   // p * rank limit for the dense factor solve
constexpr Index kPolishMaxIter = 2000;

// Alternating ridge on B = L M^T with penalty (lambda/2)(||L||^2 + ||M||^2),
// whose minimum over factorizations equals lambda |||B|||_1. Started from the
// balanced factors of the current iterate at its numerical rank; a direction
// is added when the inactive block of the certificate is violated.
Polish polish(const std::vector<Matrix>& gram, const std::vector<Vector>& xty, const MultiTaskDataset& data,
              const CoefMatrix& start, double lambda, double tol) {
  const Index p = start.rows(), n = start.cols();
  const double half = 0.5 * lambda;
  Polish out;
  out.coef = start;
  spectra::Svd s = spectra::svd(start);
  Matrix l = s.left * s.singulars.cwiseSqrt().asDiagonal();
  Matrix m = s.right * s.singulars.cwiseSqrt().asDiagonal();
  for (Index round = 0; round <= p; ++round) {
    const Index r = l.cols();
    if (p * r > kPolishMaxDim) return out;
    bool converged = r == 0;
    CoefMatrix b = l * m.transpose();
    for (Index it = 0; it < kPolishMaxIter && r > 0; ++it) {
      ++out.iterations;
      for (Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        Matrix h = l.transpose() * gram[si] * l;
        h.diagonal().array() += half;
        m.row(i) = h.llt().solve(l.transpose() * xty[si]).transpose();
      }
      Matrix h = Matrix::Zero(p * r, p * r);
      Vector rhs = Vector::Zero(p * r);
      for (Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        for (Index a = 0; a < r; ++a) {
          rhs.segment(a * p, p) += m(i, a) * xty[si];
          for (Index c = 0; c <= a; ++c) h.block(a * p, c * p, p, p) += (m(i, a) * m(i, c)) * gram[si];
        }
      }
      h.diagonal().array() += half;
      const Vector vec_l = h.selfadjointView<Eigen::Lower>().llt().solve(rhs);
      l = Eigen::Map<const Matrix>(vec_l.data(), p, r);
      const CoefMatrix next = l * m.transpose();
      const double change = (next - b).lpNorm<Eigen::Infinity>();
      b = next;
      if (change < tol * std::max(1.0, b.lpNorm<Eigen::Infinity>())) {
        converged = true;
        break;
      }
    }
    if (!b.allFinite()) return out;
    out.coef = b;
    out.applied = true;
    out.converged = converged;
    // Inactive block: top singular pair of (I - U U^T) R.
    s = spectra::svd(b);
    const Matrix resid = residual_correlations(b, data);
    const Matrix projected = resid - s.left * (s.left.transpose() * resid);
    const spectra::Svd ps = spectra::svd(projected);
    if (ps.rank() == 0 || ps.singulars(0) <= half * (1.0 + 1e-6)) return out;
    // Rebalance and add the violating direction at a small scale.
    const Index r2 = s.rank() + 1;
    l.resize(p, r2);
    m.resize(n, r2);
    l.leftCols(r2 - 1) = s.left * s.singulars.cwiseSqrt().asDiagonal();
    m.leftCols(r2 - 1) = s.right * s.singulars.cwiseSqrt().asDiagonal();
    const double seed_scale = std::sqrt(1e-3 * (ps.singulars(0) - half) / std::max(lambda, 1e-300));
    l.col(r2 - 1) = seed_scale * ps.left.col(0);
    m.col(r2 - 1) = seed_scale * ps.right.col(0);
    out.converged = false;
  }
  return out;
}

}  // namespace

void validate(const Options& opts) {
  require(opts.lambda >= 0.0 && std::isfinite(opts.lambda), ErrorCode::InvalidArgument,
          "ring: lambda must be finite and >= 0");
  require(opts.gamma > 0.0 && opts.gamma <= 1.0, ErrorCode::InvalidArgument, "ring: gamma must lie in (0, 1]");
  require(opts.zero_tol > 0.0, ErrorCode::InvalidArgument, "ring: zero_tol must be > 0");
  require(opts.lambda_factor > 1.0, ErrorCode::InvalidArgument, "ring: lambda_factor must exceed 1");
  require(opts.svd_refresh_every >= 1, ErrorCode::InvalidArgument, "ring: svd_refresh_every must be positive");
  require(opts.init_scale > 0.0, ErrorCode::InvalidArgument, "ring: init_scale must be > 0");
  require(opts.max_passes >= 1, ErrorCode::InvalidArgument, "ring: max_passes must be positive");
  require(opts.tol > 0.0, ErrorCode::InvalidArgument, "ring: tol must be > 0");
  if (opts.target_rank) {
    require(*opts.target_rank >= 0, ErrorCode::InvalidArgument, "ring: target_rank must be >= 0");
    require(opts.lambda > 0.0, ErrorCode::InvalidArgument, "ring: lambda tuning needs a positive starting lambda");
  }
}

double objective(const CoefMatrix& b, const MultiTaskDataset& data, double lambda) {
  const double risk = empirical_risk(b, data);
  return lambda == 0.0 ? risk : risk + lambda * spectra::nuclear_norm(b);
}

Matrix regularize_accumulation(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "accumulation matrix must be square");
  Matrix out = a;
  out.diagonal().array() += accumulation_floor(a);
  return out;
}

Vector ridge_step(const Matrix& x, const Vector& residual, const Matrix& a, double lambda, const Vector* beta) {
  const Index p = x.cols();
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "ridge_step: lambda must be >= 0");
  require(residual.size() == x.rows(), ErrorCode::DimensionMismatch, "ridge_step: residual length");
  require(a.rows() == p && a.cols() == p, ErrorCode::DimensionMismatch, "ridge_step: A must be p x p");
  require(!beta || beta->size() == p, ErrorCode::DimensionMismatch, "ridge_step: beta length");
  Matrix m = x.transpose() * x;
  Vector rhs = x.transpose() * residual;
  if (lambda > 0.0) {
    const Matrix weight = 0.5 * lambda * spectra::pinv_sqrt(regularize_accumulation(a));
    m += weight;
    if (beta) rhs.noalias() -= weight * *beta;
  }
  return solve_spd(m, rhs);
}

Fit fit(const MultiTaskDataset& data, const Options& opts, const CoefMatrix* warm_start) {
  validate(opts);
  const Index n = data.num_tasks(), p = data.num_features();
  Fit out;
  CoefMatrix& b = out.coef;
  if (warm_start) {
    require_shape(*warm_start, data, "ring::fit warm start");
    b = *warm_start;
  } else {
    RandomStream rng(opts.seed, 0);
    b.resize(p, n);
    for (Index i = 0; i < n; ++i) {
      for (Index l = 0; l < p; ++l) {
        double v = opts.init_scale * (2.0 * rng.uniform_open() - 1.0);
        if (v == 0.0) v = 0.5 * opts.init_scale;
        b(l, i) = v;
      }
    }
  }
  // A warm start at exactly zero would leave the accumulation matrix at its floor;
  // that is still a valid (if slow) start, so it is kept as given.

  std::vector<Matrix> gram(static_cast<std::size_t>(n));
  std::vector<Vector> xty(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Task& t = data.task(i);
    gram[static_cast<std::size_t>(i)] = t.design.transpose() * t.design;
    xty[static_cast<std::size_t>(i)] = t.design.transpose() * t.response;
  }

  Report& rep = out.report;
  double lambda = opts.lambda;
  double factor = opts.lambda_factor;
  int last_direction = 0;
  const bool tuning = opts.target_rank.has_value();

  auto record = [&](const CoefMatrix& coef) {
    const spectra::Svd s = spectra::svd(coef);
    const double obj = empirical_risk(coef, data) + lambda * s.singulars.sum();
    rep.objective_trace.push_back(obj);
    const double top = s.rank() > 0 ? s.singulars(0) : 0.0;
    rep.rank_trace.push_back(top > 0.0 ? count_above(s.singulars, kRankRel * top) : 0);
    const Vector row_energy = coef.rowwise().squaredNorm() / static_cast<double>(n);
    rep.coordinate_count_trace.push_back(count_above(row_energy, opts.zero_tol));
    rep.singular_count_trace.push_back(
        count_above(s.singulars.array().square().matrix() / static_cast<double>(n), opts.zero_tol));
    rep.lambda_trace.push_back(lambda);
    return obj;
  };

  double best_obj = record(b);
  CoefMatrix best = b;
  rep.best_pass = 0;
  rep.termination = Termination::MaxIterations;

  Matrix a = b * b.transpose();
  Matrix weight;  // (lambda/2) * A_reg^{+1/2}, refreshed periodically
  Index since_refresh = opts.svd_refresh_every;
  double smoothing = opts.smoothing_start;
  for (Index pass = 1; pass <= opts.max_passes; ++pass) {
    double max_change = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (since_refresh >= opts.svd_refresh_every) {
        const Matrix exact = b * b.transpose();
        rep.max_accumulation_drift =
            std::max(rep.max_accumulation_drift, (a - exact).norm() / (1.0 + a.norm()));
        a = exact;
        if (lambda > 0.0) {
          Matrix reg = a;
          reg.diagonal().array() += accumulation_floor(a, smoothing);
          weight = 0.5 * lambda * spectra::pinv_sqrt(reg);
        } else {
          weight = Matrix::Zero(p, p);
        }
        since_refresh = 0;
      }
      ++since_refresh;
      const auto si = static_cast<std::size_t>(i);
      const Vector beta = b.col(i);
      const Vector rhs = xty[si] - gram[si] * beta - weight * beta;
      const Vector delta = opts.gamma * solve_spd(gram[si] + weight, rhs);
      const Vector next = beta + delta;
      a.noalias() += next * next.transpose();
      a.noalias() -= beta * beta.transpose();
      b.col(i) = next;
      max_change = std::max(max_change, delta.lpNorm<Eigen::Infinity>());
    }
    ++rep.passes;
    rep.max_accumulation_drift = std::max(rep.max_accumulation_drift,
                                          (a - b * b.transpose()).norm() / (1.0 + a.norm()));

    const double obj = record(b);
    if (!tuning && obj <= best_obj) {
      best_obj = obj;
      best = b;
      rep.best_pass = pass;
    }
    const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
    if (!(std::isfinite(obj))) fail(ErrorCode::NonFinite, "ring: objective became non-finite");
    const bool smoothed = smoothing > kFloorRel;
    if (!smoothed && max_change < opts.tol * scale) {
      rep.termination = Termination::Converged;
      break;
    }
    // Tighten the smoothing once the iterate is stationary for the smoothed
    // penalty at the current level: R = (lambda/2) (A + floor I)^{-1/2} B.
    if (smoothed && tuning) {
      smoothing = std::max(kFloorRel, smoothing * opts.smoothing_decay);
    } else if (smoothed && lambda > 0.0) {
      Matrix reg = b * b.transpose();
      reg.diagonal().array() += accumulation_floor(reg, smoothing);
      const Matrix w = 0.5 * lambda * spectra::pinv_sqrt(reg);
      Matrix r(p, n);
      for (Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        r.col(i) = xty[si] - gram[si] * b.col(i);
      }
      const double residual = (r - w * b).norm();
      if (residual <= opts.smoothing_settle * std::sqrt(smoothing) * (1.0 + r.norm())) {
        smoothing = std::max(kFloorRel, smoothing * opts.smoothing_decay);
        since_refresh = opts.svd_refresh_every;
      }
    } else if (smoothed) {
      smoothing = kFloorRel;
    }
    if (tuning) {
      const int direction = rep.coordinate_count_trace.back() > *opts.target_rank ? 1 : -1;
      if (last_direction != 0 && direction != last_direction) factor = std::sqrt(factor);
      last_direction = direction;
      lambda = direction > 0 ? lambda * factor : lambda / factor;
      since_refresh = opts.svd_refresh_every;  // weight depends on lambda
    }
  }

  if (tuning) {
    // The last recorded entry was evaluated at the lambda in force during that pass.
    lambda = rep.lambda_trace.back();
    rep.best_pass = rep.passes;
  } else {
    b = best;
  }
  rep.final_lambda = lambda;
  rep.final_smoothing = smoothing;
  if (opts.truncate_floor_directions && lambda > 0.0) {
    rep.truncated_directions = truncate_floor_directions(b, data, lambda);
  }
  if (opts.polish && !tuning && lambda > 0.0) {
    const Polish pol = polish(gram, xty, data, b, lambda, opts.tol);
    rep.polish_iterations = pol.iterations;
    if (pol.applied) {
      const double before = objective(b, data, lambda);
      const double after = objective(pol.coef, data, lambda);
      if (after <= before * (1.0 + 1e-12)) {
        b = pol.coef;
        rep.objective_trace.push_back(after);
        if (pol.converged) rep.termination = Termination::Converged;
      }
    }
  }
  const KktResiduals kkt = kkt_residuals(b, data, lambda);
  rep.kkt_active = kkt.active;
  rep.kkt_inactive = kkt.inactive;
  return out;
}

double KktResiduals::max_active() const {
  double out = 0.0;
  for (double v : active) out = std::max(out, v);
  return out;
}

double KktResiduals::max_inactive() const {
  double out = -std::numeric_limits<double>::infinity();
  for (double v : inactive) out = std::max(out, v);
  return out;
}

bool KktResiduals::certified(double lambda, double rel_tol) const {
  return max_active() <= rel_tol * (1.0 + r_frobenius) && max_inactive() <= rel_tol * lambda;
}

KktResiduals kkt_residuals(const CoefMatrix& b, const MultiTaskDataset& data, double lambda, double rank_rel_tol) {
  require_shape(b, data, "ring::kkt_residuals");
  const Matrix r = residual_correlations(b, data);
  const spectra::Svd s = spectra::svd(b);
  KktResiduals out;
  out.r_frobenius = r.norm();
  const double top = s.rank() > 0 ? s.singulars(0) : 0.0;
  const Index active = top > 0.0 ? count_above(s.singulars, rank_rel_tol * top) : 0;
  out.active_rank = active;
  for (Index k = 0; k < active; ++k) {
    const double row = (r.transpose() * s.left.col(k) - 0.5 * lambda * s.right.col(k)).norm();
    const double col = (r * s.right.col(k) - 0.5 * lambda * s.left.col(k)).norm();
    out.active.push_back(std::max(row, col));
  }
  const Index p = b.rows();
  if (active < p) {
    const Matrix u = s.left.leftCols(active);
    const Matrix projected = r - u * (u.transpose() * r);
    Eigen::JacobiSVD<Matrix> jsvd(projected);
    const Vector sv = jsvd.singularValues();
    const Index count = std::min<Index>(p - active, sv.size());
    for (Index k = 0; k < count; ++k) out.inactive.push_back(sv(k) - 0.5 * lambda);
    for (Index k = count; k < p - active; ++k) out.inactive.push_back(-0.5 * lambda);
  }
  return out;
}

double zero_threshold(const MultiTaskDataset& data) {
  const Matrix r0 = residual_correlations(CoefMatrix::Zero(data.num_features(), data.num_tasks()), data);
  return 2.0 * spectra::spectral_norm(r0);
}

Index numerical_rank(const Matrix& b, double rel_tol) {
  const spectra::Svd s = spectra::svd(b);
  if (s.rank() == 0) return 0;
  return count_above(s.singulars, rel_tol * s.singulars(0));
}

std::vector<RankPathPoint> rank_path(const MultiTaskDataset& data, const std::vector<double>& lambda_grid,
                                     Options opts) {
  require(!lambda_grid.empty(), ErrorCode::InvalidArgument, "rank_path: empty grid");
  for (std::size_t k = 1; k < lambda_grid.size(); ++k) {
    require(lambda_grid[k] > lambda_grid[k - 1], ErrorCode::InvalidArgument, "rank_path: grid must be increasing");
  }
  opts.target_rank.reset();
  std::vector<RankPathPoint> out;
  std::optional<CoefMatrix> previous;
  for (double lambda : lambda_grid) {
    opts.lambda = lambda;
    // A zero warm start would pin the accumulation matrix at its floor; restart instead.
    const bool usable = previous && previous->squaredNorm() > 0.0;
    Fit f = fit(data, opts, usable ? &*previous : nullptr);
    out.push_back({lambda, numerical_rank(f.coef, kRankRel), objective(f.coef, data, lambda), f.report.converged()});
    previous = std::move(f.coef);
  }
  return out;
}

}  // namespace mtreg::ring
