#include "mtreg/lassoes.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mtreg/errors.hpp"
#include "mtreg/parallel.hpp"

namespace mtreg::lassoes {

namespace {

constexpr double kWeightFloor = 1e-12;  // relative to lambda
constexpr double kInnerTol = 1e-12;     // max scaled coordinate move, relative to ||y||

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

struct TaskSolver {
  const Task& task;
  const Options& opts;
  Vector energy;  // ||x_l||^2

  TaskSolver(const Task& t, const Options& o) : task(t), opts(o) {
    energy = t.design.colwise().squaredNorm().transpose();
  }

  double penalty(const Vector& beta) const {
    if (opts.lambda == 0.0) return 0.0;
    return opts.lambda * std::pow(task_norm(beta, opts.norm_mode), opts.alpha);
  }

  double weight(const Vector& beta) const {
    const double n = task_norm(beta, opts.norm_mode);
    const double w = opts.alpha == 1.0 ? opts.lambda : opts.lambda * opts.alpha * std::pow(n, opts.alpha - 1.0);
    return std::max(w, kWeightFloor * opts.lambda);
  }

  // Cyclic coordinate descent on ||y - X beta||^2 + w ||beta||_1; `resid` tracks y - X beta.
  Index weighted_lasso(double w, Vector& beta, Vector& resid) const {
    const double scale = std::max(task.response.norm(), std::numeric_limits<double>::min());
    const Index p = beta.size();
    Index sweep = 0;
    while (sweep < opts.max_inner) {
      ++sweep;
      double max_move = 0.0;
      for (Index l = 0; l < p; ++l) {
        const double e = energy(l);
        if (e == 0.0) {
          beta(l) = 0.0;
          continue;
        }
        const double old = beta(l);
        const double rho = task.design.col(l).dot(resid) + e * old;
        const double updated = soft_threshold(rho, 0.5 * w) / e;
        const double delta = updated - old;
        if (delta != 0.0) {
          resid.noalias() -= delta * task.design.col(l);
          beta(l) = updated;
          max_move = std::max(max_move, std::abs(delta) * std::sqrt(e));
        }
      }
      if (max_move <= kInnerTol * scale) break;
    }
    return sweep;
  }

  struct Result {
    Vector beta;
    std::vector<double> trace;
    Index outer = 0;
    Index inner = 0;
    bool converged = false;
  };

  Result solve(const Vector& init) const {
    Result out;
    Vector beta = init;
    Vector resid = task.response - task.design * beta;
    Vector best = beta;
    double best_obj = resid.squaredNorm() + penalty(beta);
    out.trace.push_back(best_obj);

    double w = weight(beta);
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double width_prev = hi, width_prev2 = hi;
    for (Index t = 0; t < opts.max_outer; ++t) {
      out.inner += weighted_lasso(w, beta, resid);
      ++out.outer;
      const double obj = resid.squaredNorm() + penalty(beta);
      if (obj <= best_obj) {
        best_obj = obj;
        best = beta;
      }
      out.trace.push_back(best_obj);

      const double gw = weight(beta);
      if (std::abs(gw - w) <= opts.tol * std::max(gw, w)) {
        out.converged = true;
        break;
      }
      // g is nonincreasing in w, so w < g(w) puts the fixed point above w.
      if (gw > w) lo = w; else hi = w;
      double next = gw;
      const double width = hi - lo;
      const bool stalled = std::isfinite(width_prev2) && width > 0.5 * width_prev2;
      if (!(next > lo && next < hi) || stalled) {
        if (std::isfinite(hi)) next = 0.5 * (lo + hi);
      }
      width_prev2 = width_prev;
      width_prev = width;
      w = next;
    }
    out.beta = best;
    return out;
  }
};

}  // namespace

const char* to_string(NormMode mode) { return mode == NormMode::Augmented ? "augmented" : "plain"; }

NormMode norm_mode_from_string(const std::string& s) {
  if (s == "augmented") return NormMode::Augmented;
  if (s == "plain") return NormMode::Plain;
  fail(ErrorCode::InvalidArgument, "unknown norm mode '" + s + "'");
}

void validate(const Options& opts) {
  require(opts.alpha >= 1.0, ErrorCode::InvalidArgument, "lassoes: alpha must be >= 1");
  require(opts.lambda >= 0.0, ErrorCode::InvalidArgument, "lassoes: lambda must be >= 0");
  require(opts.tol > 0.0, ErrorCode::InvalidArgument, "lassoes: tol must be > 0");
  require(opts.max_outer >= 1 && opts.max_inner >= 1, ErrorCode::InvalidArgument,
          "lassoes: iteration limits must be positive");
}

double task_norm(const Vector& beta, NormMode mode) {
  const double l1 = beta.lpNorm<1>();
  return mode == NormMode::Augmented ? 1.0 + l1 : l1;
}

double objective(const CoefMatrix& b, const MultiTaskDataset& data, const Options& opts) {
  require_shape(b, data, "lassoes::objective");
  double total = empirical_risk(b, data);
  if (opts.lambda == 0.0) return total;
  for (Index i = 0; i < b.cols(); ++i) {
    total += opts.lambda * std::pow(task_norm(b.col(i), opts.norm_mode), opts.alpha);
  }
  return total;
}

Fit fit(const MultiTaskDataset& data, const Options& opts, const CoefMatrix* warm_start) {
  validate(opts);
  const Index n = data.num_tasks(), p = data.num_features();
  if (warm_start) require_shape(*warm_start, data, "lassoes::fit warm start");

  std::vector<TaskSolver::Result> results(static_cast<std::size_t>(n));
  parallel_for(n, opts.threads, [&](long i) {
    const TaskSolver solver(data.task(i), opts);
    const Vector init = warm_start ? Vector(warm_start->col(i)) : Vector::Zero(p);
    results[static_cast<std::size_t>(i)] = solver.solve(init);
  });

  Fit out;
  out.coef.resize(p, n);
  FitReport& rep = out.report;
  rep.penalty = "lassoes";
  rep.norm_mode = to_string(opts.norm_mode);
  std::size_t trace_len = 0;
  bool all_converged = true;
  for (Index i = 0; i < n; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    out.coef.col(i) = r.beta;
    trace_len = std::max(trace_len, r.trace.size());
    rep.iterations = std::max(rep.iterations, r.outer);
    rep.inner_iterations += r.inner;
    all_converged = all_converged && r.converged;
  }
  // Tasks that stop early keep contributing their final value.
  rep.objective_trace.assign(trace_len, 0.0);
  for (const auto& r : results) {
    for (std::size_t k = 0; k < trace_len; ++k) {
      rep.objective_trace[k] += r.trace[std::min(k, r.trace.size() - 1)];
    }
  }
  rep.termination = all_converged ? Termination::Converged : Termination::MaxIterations;
  rep.kkt_residuals = kkt_residual(out.coef, data, opts);
  const SparsitySummary summary = sparsity_summary(out.coef);
  rep.active_set_sizes = summary.task_count;
  rep.row_support = static_cast<Index>(summary.row_support.size());
  rep.rank = summary.rank;
  return out;
}

std::vector<double> kkt_residual(const CoefMatrix& b, const MultiTaskDataset& data, const Options& opts) {
  validate(opts);
  require_shape(b, data, "lassoes::kkt_residual");
  const Matrix grad = residual_correlations(b, data);
  std::vector<double> out(static_cast<std::size_t>(b.cols()), 0.0);
  for (Index i = 0; i < b.cols(); ++i) {
    const double n = task_norm(b.col(i), opts.norm_mode);
    const double w = opts.alpha == 1.0 ? opts.lambda : opts.lambda * opts.alpha * std::pow(n, opts.alpha - 1.0);
    double worst = 0.0;
    for (Index l = 0; l < b.rows(); ++l) {
      const double g = 2.0 * grad(l, i);
      const double beta = b(l, i);
      const double r = beta != 0.0 ? std::abs(-g + w * (beta > 0.0 ? 1.0 : -1.0))
                                   : std::max(0.0, std::abs(g) - w);
      worst = std::max(worst, r);
    }
    out[static_cast<std::size_t>(i)] = worst;
  }
  return out;
}

LambdaSelection select_lambda(const MultiTaskDataset& data, double alpha, const std::vector<double>& grid,
                              Options base, bool warm) {
  require(alpha > 2.0, ErrorCode::InvalidArgument, "select_lambda: alpha must exceed 2");
  require(grid.size() >= 3, ErrorCode::InvalidArgument, "select_lambda: grid needs at least 3 points");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require(grid[k] > 0.0, ErrorCode::InvalidArgument, "select_lambda: grid values must be positive");
    if (k > 0) {
      require(grid[k] < grid[k - 1], ErrorCode::InvalidArgument, "select_lambda: grid must be strictly decreasing");
    }
  }
  base.alpha = alpha;
  const double n = static_cast<double>(data.num_tasks());

  LambdaSelection out;
  std::optional<CoefMatrix> previous;
  std::optional<std::size_t> crossing;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    base.lambda = grid[k];
    Fit f = fit(data, base, warm && previous ? &*previous : nullptr);
    double g = 0.0;
    for (Index i = 0; i < f.coef.cols(); ++i) g += std::pow(f.coef.col(i).lpNorm<1>(), 2);
    g /= n;
    const double curve = std::pow(grid[k], -2.0 / alpha);
    out.path.push_back({grid[k], g, curve});
    if (!crossing && g >= curve) {
      crossing = k;
      out.coef = f.coef;
    }
    previous = std::move(f.coef);
  }
  if (crossing) {
    out.index = static_cast<Index>(*crossing);
  } else {
    out.no_crossing = true;
    out.index = static_cast<Index>(grid.size() - 1);
    out.coef = *previous;
  }
  out.lambda = grid[static_cast<std::size_t>(out.index)];
  return out;
}

std::vector<double> geometric_grid(double hi, double lo, Index count) {
  require(hi > lo && lo > 0.0 && count >= 2, ErrorCode::InvalidArgument,
          "geometric_grid: need hi > lo > 0 and at least two points");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double ratio = std::log(lo / hi) / static_cast<double>(count - 1);
  for (Index k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = hi * std::exp(ratio * static_cast<double>(k));
  out.front() = hi;
  out.back() = lo;
  return out;
}

}  // namespace mtreg::lassoes
