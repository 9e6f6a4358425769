#include "mtreg/group.hpp"

#include <cmath>

#include "mtreg/errors.hpp"

namespace mtreg::group {

namespace {

constexpr double kBisectionTol = 1e-12;
constexpr double kStepFloor = 1e-13;  // smallest coefficient step the stop rule demands

double row_norm_sum(const CoefMatrix& b) {
  double total = 0.0;
  for (Index l = 0; l < b.rows(); ++l) total += b.row(l).norm();
  return total;
}

}  // namespace

void validate(const Options& opts) {
  require(opts.lambda >= 0.0, ErrorCode::InvalidArgument, "group: lambda must be >= 0");
  require(opts.tol > 0.0, ErrorCode::InvalidArgument, "group: tol must be > 0");
  require(opts.max_sweeps >= 1, ErrorCode::InvalidArgument, "group: max_sweeps must be positive");
}

double objective(const CoefMatrix& b, const MultiTaskDataset& data, double lambda) {
  return empirical_risk(b, data) + lambda * row_norm_sum(b);
}

double multiplier_rhs(const Vector& inner, const Vector& energy, double mu) {
  double total = 0.0;
  for (Index i = 0; i < inner.size(); ++i) {
    const double term = inner(i) == 0.0 ? 0.0 : mu * inner(i) / (mu + energy(i));
    total += term * term;
  }
  return total;
}

std::optional<double> lambda_star(const Vector& inner, const Vector& energy, double lambda) {
  require(lambda > 0.0, ErrorCode::InvalidArgument, "lambda_star: lambda must be positive");
  require(inner.size() == energy.size(), ErrorCode::DimensionMismatch, "lambda_star: length mismatch");
  const double target = 0.25 * lambda * lambda;
  // RHS increases to sum a_i^2 as mu -> infinity.
  if (inner.squaredNorm() <= target) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  while (multiplier_rhs(inner, energy, hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > kBisectionTol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (multiplier_rhs(inner, energy, mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Fit fit(const MultiTaskDataset& data, const Options& opts, const CoefMatrix* warm_start) {
  validate(opts);
  const Index n = data.num_tasks(), p = data.num_features();
  Fit out;
  out.coef = warm_start ? *warm_start : CoefMatrix::Zero(p, n);
  require_shape(out.coef, data, "group::fit");
  CoefMatrix& b = out.coef;

  Matrix energy(p, n);
  for (Index i = 0; i < n; ++i) energy.col(i) = data.task(i).design.colwise().squaredNorm().transpose();
  std::vector<Vector> resid = residuals(b, data);

  auto current_objective = [&] {
    double total = opts.lambda * row_norm_sum(b);
    for (const Vector& r : resid) total += r.squaredNorm();
    return total;
  };

  FitReport& rep = out.report;
  rep.penalty = "group";
  rep.termination = Termination::MaxIterations;
  double obj = current_objective();
  rep.objective_trace.push_back(obj);

  Vector inner(n);
  for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Index l = 0; l < p; ++l) {
      for (Index i = 0; i < n; ++i) {
        const auto x = data.task(i).design.col(l);
        inner(i) = x.dot(resid[static_cast<std::size_t>(i)]) + energy(l, i) * b(l, i);
      }
      Vector updated = Vector::Zero(n);
      if (opts.lambda == 0.0) {
        for (Index i = 0; i < n; ++i) updated(i) = energy(l, i) > 0.0 ? inner(i) / energy(l, i) : 0.0;
      } else if (const auto mu = lambda_star(inner, energy.row(l).transpose(), opts.lambda)) {
        for (Index i = 0; i < n; ++i) updated(i) = inner(i) / (*mu + energy(l, i));
      }
      for (Index i = 0; i < n; ++i) {
        const double delta = updated(i) - b(l, i);
        max_delta = std::max(max_delta, std::abs(delta));
        if (delta != 0.0) {
          resid[static_cast<std::size_t>(i)].noalias() -= delta * data.task(i).design.col(l);
          b(l, i) = updated(i);
        }
      }
    }
    ++rep.iterations;
    const double next = current_objective();
    rep.objective_trace.push_back(next);
    const double step_tol = std::max(opts.tol, kStepFloor) * (1.0 + b.cwiseAbs().maxCoeff());
    const bool done = std::abs(obj - next) <= opts.tol * std::max(std::abs(next), 1e-300) && max_delta <= step_tol;
    obj = next;
    if (done) {
      rep.termination = Termination::Converged;
      break;
    }
  }

  rep.kkt_residuals = kkt_residuals(b, data, opts.lambda);
  const SparsitySummary summary = sparsity_summary(b);
  rep.active_set_sizes = summary.task_count;
  rep.row_support = static_cast<Index>(summary.row_support.size());
  rep.rank = summary.rank;
  return out;
}

ZeroCertificate zero_certificate(const MultiTaskDataset& data, double lambda) {
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "zero_certificate: lambda must be >= 0");
  const Matrix xty = residual_correlations(CoefMatrix::Zero(data.num_features(), data.num_tasks()), data);
  ZeroCertificate out;
  out.holds = true;
  for (Index l = 0; l < xty.rows(); ++l) {
    const double energy = xty.row(l).squaredNorm();
    out.raw_margins.push_back(lambda * lambda - energy);
    out.rescaled_margins.push_back(0.25 * lambda * lambda - energy);
    out.holds = out.holds && out.rescaled_margins.back() > 0.0;
  }
  return out;
}

std::vector<double> kkt_residuals(const CoefMatrix& b, const MultiTaskDataset& data, double lambda) {
  const Matrix grad = 2.0 * residual_correlations(b, data);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(b.rows()));
  for (Index l = 0; l < b.rows(); ++l) {
    const double norm = b.row(l).norm();
    if (norm > 0.0) {
      out.push_back((-grad.row(l) + lambda * b.row(l) / norm).norm());
    } else {
      out.push_back(std::max(0.0, grad.row(l).norm() - lambda));
    }
  }
  return out;
}

}  // namespace mtreg::group
