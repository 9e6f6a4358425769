#include "mtreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mtreg/errors.hpp"
#include "mtreg/parallel.hpp"
#include "mtreg/rng.hpp"

namespace mtreg::diagnostics {

namespace {

constexpr Index kEnumerationMaxP = 12;
constexpr double kAgreeTol = 1e-4;
constexpr double kE = 2.718281828459045;

// Euclidean projection of w (viewed as a flat vector) onto {|w|_1 <= radius}.
void project_l1_ball(Eigen::Ref<Vector> w, double radius) {
  if (radius <= 0.0) {
    w.setZero();
    return;
  }
  if (w.lpNorm<1>() <= radius) return;
  std::vector<double> mags(static_cast<std::size_t>(w.size()));
  for (Index k = 0; k < w.size(); ++k) mags[static_cast<std::size_t>(k)] = std::abs(w(k));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double t = (cumulative - radius) / static_cast<double>(k + 1);
    if (k + 1 == mags.size() || mags[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (Index k = 0; k < w.size(); ++k) {
    const double a = std::abs(w(k)) - theta;
    w(k) = a > 0.0 ? std::copysign(a, w(k)) : 0.0;
  }
}

double cone_norm(const Matrix& w, int q) {
  if (w.size() == 0) return 0.0;
  if (q == 1) return w.cwiseAbs().sum();
  return w.rowwise().norm().sum();
}

// Projection onto {cone_norm(w) <= radius}: entrywise l1 ball for q = 1,
// rowwise group-l1 ball for q = 2.
void project_cone_ball(Matrix& w, double radius, int q) {
  if (w.size() == 0) return;
  if (q == 1) {
    Eigen::Map<Vector> flat(w.data(), w.size());
    project_l1_ball(flat, radius);
    return;
  }
  Vector norms = w.rowwise().norm();
  const Vector original = norms;
  project_l1_ball(norms, radius);
  for (Index r = 0; r < w.rows(); ++r) {
    if (original(r) > 0.0) w.row(r) *= norms(r) / original(r);
  }
}

void project_nuclear_ball(Matrix& w, double radius) {
  if (w.size() == 0) return;
  Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues();
  if (s.sum() <= radius) return;
  project_l1_ball(s, radius);
  w = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

double quad(const std::vector<Matrix>& grams, const Matrix& delta) {
  double total = 0.0;
  for (std::size_t i = 0; i < grams.size(); ++i) {
    const auto d = delta.col(static_cast<Index>(i));
    total += d.dot(grams[i] * d);
  }
  return total;
}

Matrix quad_gradient(const std::vector<Matrix>& grams, const Matrix& delta) {
  Matrix g(delta.rows(), delta.cols());
  for (std::size_t i = 0; i < grams.size(); ++i) {
    g.col(static_cast<Index>(i)) = 2.0 * grams[i] * delta.col(static_cast<Index>(i));
  }
  return g;
}

std::vector<Matrix> normalized_grams(const std::vector<Matrix>& blocks) {
  require(!blocks.empty(), ErrorCode::InvalidArgument, "design blocks are empty");
  const Index p = blocks.front().cols();
  std::vector<Matrix> grams;
  for (const Matrix& x : blocks) {
    require(x.cols() == p, ErrorCode::DimensionMismatch, "design blocks differ in column count");
    require(x.rows() > 0, ErrorCode::InvalidArgument, "design block has no rows");
    grams.push_back(x.transpose() * x / static_cast<double>(x.rows()));
  }
  return grams;
}

double lipschitz(const std::vector<Matrix>& grams) {
  double top = 0.0;
  for (const Matrix& g : grams) top = std::max(top, spectra::sym_eigen(g).eigenvalues(0));
  return std::max(2.0 * top, 1e-12);
}

// Projected gradient over (u, w) where delta = embed(u, w); u is kept on the
// unit sphere and w inside a ball scaled by the cone norm of u.
template <class Embed, class Split, class Project>
double descend(const std::vector<Matrix>& grams, Matrix u, Matrix w, double lip, Index steps, Embed embed,
               Split split, Project project) {
  auto feasible = [&](Matrix& uu, Matrix& ww) {
    const double norm = uu.norm();
    if (norm > 0.0) uu /= norm;
    project(uu, ww);
  };
  feasible(u, w);
  double value = quad(grams, embed(u, w));
  double step = 1.0 / lip;
  const double min_step = 1e-12 / lip;
  for (Index t = 0; t < steps && step > min_step; ++t) {
    const Matrix grad = quad_gradient(grams, embed(u, w));
    Matrix gu, gw;
    split(grad, gu, gw);
    Matrix nu = u - step * gu;
    Matrix nw = w - step * gw;
    if (nu.norm() == 0.0) {
      step *= 0.5;
      continue;
    }
    feasible(nu, nw);
    const double next = quad(grams, embed(nu, nw));
    if (next < value) {
      const bool stalled = value - next <= 1e-15 * std::max(value, 1e-300);
      u = std::move(nu);
      w = std::move(nw);
      value = next;
      if (stalled) break;
    } else {
      step *= 0.5;
    }
  }
  return std::sqrt(std::max(value, 0.0));
}

Matrix gaussian(RandomStream& rng, Index rows, Index cols) {
  Matrix out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = rng.normal();
  return out;
}

std::vector<std::vector<Index>> all_subsets(Index p, Index k) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> current(static_cast<std::size_t>(k));
  std::iota(current.begin(), current.end(), Index{0});
  while (true) {
    out.push_back(current);
    Index pos = k - 1;
    while (pos >= 0 && current[static_cast<std::size_t>(pos)] == p - k + pos) --pos;
    if (pos < 0) break;
    ++current[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

std::vector<Index> random_subset(RandomStream& rng, Index p, Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index j = 0; j < k; ++j) {
    const auto span = static_cast<std::uint64_t>(p - j);
    const Index pick = j + static_cast<Index>(rng.next_u64() % span);
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct SupportResult {
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

SupportResult minimize_support(const std::vector<Matrix>& grams, const std::vector<Index>& support, double c0, int q,
                               double lip, const ReOptions& opts, std::uint64_t seed) {
  const Index p = grams.front().rows();
  const Index n = static_cast<Index>(grams.size());
  const Index k = static_cast<Index>(support.size());
  std::vector<Index> rest;
  {
    std::vector<bool> in(static_cast<std::size_t>(p), false);
    for (Index j : support) in[static_cast<std::size_t>(j)] = true;
    for (Index j = 0; j < p; ++j)
      if (!in[static_cast<std::size_t>(j)]) rest.push_back(j);
  }
  const Index kc = static_cast<Index>(rest.size());

  auto embed = [&](const Matrix& u, const Matrix& w) {
    Matrix delta = Matrix::Zero(p, n);
    for (Index r = 0; r < k; ++r) delta.row(support[static_cast<std::size_t>(r)]) = u.row(r);
    for (Index r = 0; r < kc; ++r) delta.row(rest[static_cast<std::size_t>(r)]) = w.row(r);
    return delta;
  };
  auto split = [&](const Matrix& g, Matrix& gu, Matrix& gw) {
    gu.resize(k, n);
    gw.resize(kc, n);
    for (Index r = 0; r < k; ++r) gu.row(r) = g.row(support[static_cast<std::size_t>(r)]);
    for (Index r = 0; r < kc; ++r) gw.row(r) = g.row(rest[static_cast<std::size_t>(r)]);
  };
  auto project = [&](const Matrix& u, Matrix& w) { project_cone_ball(w, c0 * cone_norm(u, q), q); };

  SupportResult out;
  auto offer = [&](double v) {
    if (v < out.best) {
      out.second = out.best;
      out.best = v;
    } else if (v < out.second) {
      out.second = v;
    }
  };

  // Deterministic start: the least-curved direction inside J with nothing off J.
  {
    double lowest = std::numeric_limits<double>::infinity();
    Matrix u0 = Matrix::Zero(k, n);
    for (Index i = 0; i < n; ++i) {
      Matrix sub(k, k);
      for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b)
          sub(a, b) = grams[static_cast<std::size_t>(i)](support[static_cast<std::size_t>(a)],
                                                         support[static_cast<std::size_t>(b)]);
      const spectra::SymSpectrum s = spectra::sym_eigen(sub);
      if (s.eigenvalues(k - 1) < lowest) {
        lowest = s.eigenvalues(k - 1);
        u0.setZero();
        u0.col(i) = s.eigenvectors.col(k - 1);
      }
    }
    offer(descend(grams, u0, Matrix::Zero(kc, n), lip, opts.steps, embed, split, project));
  }
  RandomStream rng(seed, 0);
  for (Index r = 1; r < opts.restarts; ++r) {
    Matrix u = gaussian(rng, k, n);
    Matrix w = gaussian(rng, kc, n);
    offer(descend(grams, u, w, lip, opts.steps, embed, split, project));
  }
  return out;
}

}  // namespace

const char* to_string(ReMethod m) { return m == ReMethod::Enumeration ? "enumeration" : "sampled"; }

std::vector<Matrix> design_blocks(const MultiTaskDataset& data) {
  std::vector<Matrix> out;
  for (const Task& t : data.tasks()) out.push_back(t.design);
  return out;
}

REEstimate re_constant(const std::vector<Matrix>& x_blocks, Index s, double c0, int q, const ReOptions& opts) {
  require(q == 1 || q == 2, ErrorCode::InvalidArgument, "re_constant: q must be 1 or 2");
  require(s >= 1, ErrorCode::InvalidArgument, "re_constant: s must be >= 1");
  require(c0 >= 0.0, ErrorCode::InvalidArgument, "re_constant: c0 must be >= 0");
  require(opts.restarts >= 1 && opts.steps >= 1, ErrorCode::InvalidArgument, "re_constant: bad optimizer budget");
  const std::vector<Matrix> grams = normalized_grams(x_blocks);
  const Index p = grams.front().rows();
  const Index k = std::min(s, p);
  const double lip = lipschitz(grams);

  REEstimate out;
  out.s = s;
  out.c0 = c0;
  out.q = q;
  out.shared_support = x_blocks.size() > 1;

  std::vector<std::vector<Index>> supports;
  if (p <= kEnumerationMaxP) {
    out.method = ReMethod::Enumeration;
    supports = all_subsets(p, k);
  } else {
    out.method = ReMethod::Sampled;
    RandomStream rng(opts.seed, 1);
    for (Index t = 0; t < opts.sampled_supports; ++t) supports.push_back(random_subset(rng, p, k));
  }
  out.candidates = static_cast<Index>(supports.size());

  std::vector<SupportResult> results(supports.size());
  parallel_for(static_cast<long>(supports.size()), opts.threads, [&](long t) {
    results[static_cast<std::size_t>(t)] =
        minimize_support(grams, supports[static_cast<std::size_t>(t)], c0, q, lip, opts,
                         derive_seed(opts.seed, static_cast<std::uint64_t>(t)));
  });
  const auto best = std::min_element(results.begin(), results.end(),
                                     [](const SupportResult& a, const SupportResult& b) { return a.best < b.best; });
  out.kappa = best->best;
  out.restart_spread = opts.restarts > 1 ? best->second - best->best : 0.0;
  out.certified = out.method == ReMethod::Enumeration && opts.restarts > 1 &&
                  out.restart_spread <= kAgreeTol * (1.0 + out.kappa);
  return out;
}

REEstimate re2_constant(const std::vector<Matrix>& x_blocks, Index s, double c0, const Re2Options& opts) {
  require(s >= 1, ErrorCode::InvalidArgument, "re2_constant: s must be >= 1");
  require(c0 >= 0.0, ErrorCode::InvalidArgument, "re2_constant: c0 must be >= 0");
  require(opts.samples >= 1 && opts.steps >= 1, ErrorCode::InvalidArgument, "re2_constant: bad sampler budget");
  const std::vector<Matrix> grams = normalized_grams(x_blocks);
  const Index p = grams.front().rows();
  const Index n = static_cast<Index>(grams.size());
  const Index k = std::min(s, p);
  const double lip = lipschitz(grams);

  Matrix total = Matrix::Zero(p, p);
  for (const Matrix& g : grams) total += g;
  const spectra::SymSpectrum pooled = spectra::sym_eigen(total);

  REEstimate out;
  out.s = s;
  out.c0 = c0;
  out.q = 0;
  out.method = ReMethod::Sampled;
  out.certified = false;
  out.shared_support = false;
  out.kappa = std::numeric_limits<double>::infinity();

  for (Index t = 0; t < opts.samples; ++t) {
    RandomStream rng(derive_seed(opts.seed, static_cast<std::uint64_t>(t)), 2);
    Matrix frame;
    if (t == 0) {
      frame = pooled.eigenvectors.rightCols(k);
    } else {
      Eigen::HouseholderQR<Matrix> qr(gaussian(rng, p, k));
      frame = qr.householderQ() * Matrix::Identity(p, k);
    }
    const Matrix basis = spectra::complete_orthonormal(frame);
    const Matrix q_in = basis.leftCols(k);
    const Matrix q_out = basis.rightCols(p - k);
    auto embed = [&](const Matrix& u, const Matrix& w) {
      Matrix delta = q_in * u;
      if (w.size() > 0) delta += q_out * w;
      return delta;
    };
    auto split = [&](const Matrix& g, Matrix& gu, Matrix& gw) {
      gu = q_in.transpose() * g;
      gw = q_out.transpose() * g;
    };
    auto project = [&](const Matrix& u, Matrix& w) { project_nuclear_ball(w, c0 * spectra::nuclear_norm(u)); };
    const Matrix u = gaussian(rng, k, n);
    const Matrix w = t == 0 ? Matrix::Zero(p - k, n) : Matrix(gaussian(rng, p - k, n));
    out.kappa = std::min(out.kappa, descend(grams, u, w, lip, opts.steps, embed, split, project));
  }
  out.candidates = opts.samples;
  return out;
}

double BoundReport::part(const std::string& key) const {
  for (const auto& [k, v] : parts)
    if (k == key) return v;
  fail(ErrorCode::InvalidArgument, name + ": no part '" + key + "'");
}

double BoundReport::input(const std::string& key) const {
  for (const auto& [k, v] : inputs)
    if (k == key) return v;
  fail(ErrorCode::InvalidArgument, name + ": no input '" + key + "'");
}

void BoundReport::check(const std::string& key, double value) {
  observed = value;
  satisfied = value <= part(key);
}

BoundReport bound_lassoes_theorem1(double c_big, double c_small, Index n, double lambda, double m, double delta,
                                   double norms0, double norms_hat) {
  require(n >= 1 && m > 0.0, ErrorCode::InvalidInputs, "lassoes risk bound: need n >= 1 and m > 0");
  require(lambda >= 0.0 && delta >= 0.0 && norms0 >= 0.0 && norms_hat >= 0.0, ErrorCode::InvalidInputs,
          "lassoes risk bound: lambda, delta and norms must be >= 0");
  BoundReport r;
  r.name = "lassoes_risk";
  const double nn = static_cast<double>(n);
  r.inputs = {{"C_n", c_big}, {"c_n", c_small}, {"n", nn},          {"lambda", lambda},
              {"m", m},       {"delta", delta}, {"norms0", norms0}, {"norms_hat", norms_hat}};
  const double rhs = nn * c_big + (lambda / m + delta) * norms0 - (lambda / m - delta) * norms_hat;
  r.parts = {{"rhs", rhs}, {"excess_risk", c_big - c_small}};
  return r;
}

BoundReport bound_lassoL1p(double s, double kappa, double m, Index n, Index p, double sigma, double a_const,
                           double alpha, double lambda, double b_cap, double b_hat_cap) {
  require(kappa > 0.0, ErrorCode::InvalidInputs, "lassoL1p bound: kappa must be > 0");
  require(alpha >= 1.0 && m > 0.0 && n >= 1 && p >= 1 && sigma >= 0.0 && s >= 0.0, ErrorCode::InvalidInputs,
          "lassoL1p bound: invalid dimensions or constants");
  require(b_cap >= 0.0 && b_hat_cap >= 0.0, ErrorCode::InvalidInputs, "lassoL1p bound: norm caps must be >= 0");
  BoundReport r;
  r.name = "lassoL1p";
  r.inputs = {{"s", s},           {"kappa", kappa},  {"m", m},           {"n", static_cast<double>(n)},
              {"p", static_cast<double>(p)}, {"sigma", sigma}, {"A", a_const}, {"alpha", alpha},
              {"lambda", lambda}, {"B", b_cap},      {"B_hat", b_hat_cap}};
  const double log_np = std::log(static_cast<double>(n) * static_cast<double>(p));
  const double cap = std::max(std::pow(b_cap, alpha - 1.0), std::pow(b_hat_cap, alpha - 1.0));
  const double noise = 2.0 * a_const * sigma * std::sqrt(log_np);
  const double part_a = std::sqrt(s) / (kappa * std::sqrt(m)) * (3.0 * alpha * lambda * cap / (2.0 * std::sqrt(m)) + noise);
  const double part_b =
      4.0 * s / (m * kappa * kappa) * (1.5 * alpha * lambda * cap + 2.0 * a_const * sigma * std::sqrt(m * log_np));
  const double lambda_min = cap > 0.0 ? 4.0 * a_const * sigma * std::sqrt(m * log_np) / (alpha * cap)
                                      : std::numeric_limits<double>::infinity();
  r.parts = {{"a", part_a}, {"b", part_b}, {"lambda_min", lambda_min}};
  if (a_const <= std::sqrt(2.0)) {
    r.outside_theorem = true;
    r.note = "A <= sqrt(2)";
  } else if (lambda < lambda_min) {
    r.outside_theorem = true;
    r.note = "lambda below the prescribed minimum";
  }
  return r;
}

BoundReport bound_lassoL1p_sparsity(double pred_err_sq, double m, double phi_i_max, double lambda, double alpha,
                                    double beta_hat_l1, double a_const, double sigma, Index n, Index p) {
  require(pred_err_sq >= 0.0 && m > 0.0 && phi_i_max >= 0.0 && alpha >= 1.0 && n >= 1 && p >= 1,
          ErrorCode::InvalidInputs, "lassoL1p sparsity bound: invalid inputs");
  const double log_np = std::log(static_cast<double>(n) * static_cast<double>(p));
  const double base =
      lambda * alpha * std::pow(beta_hat_l1, alpha - 1.0) / 2.0 - a_const * sigma * std::sqrt(m * log_np);
  require(base > 0.0, ErrorCode::InvalidInputs, "lassoL1p sparsity bound: penalty level does not dominate the noise");
  BoundReport r;
  r.name = "lassoL1p_sparsity";
  r.inputs = {{"pred_err_sq", pred_err_sq}, {"m", m},        {"phi_i_max", phi_i_max},
              {"lambda", lambda},           {"alpha", alpha}, {"beta_hat_l1", beta_hat_l1},
              {"A", a_const},               {"sigma", sigma}, {"n", static_cast<double>(n)},
              {"p", static_cast<double>(p)}};
  r.parts = {{"c", pred_err_sq * m * phi_i_max / (base * base)}};
  if (a_const <= std::sqrt(2.0)) {
    r.outside_theorem = true;
    r.note = "A <= sqrt(2)";
  }
  return r;
}

BoundReport bound_L12merge2(double s, double kappa, Index n, double m, Index p, double sigma, double a_const,
                            double b, double eta, double alpha, double c_const, double phi_max, double delta) {
  require(alpha > 2.0, ErrorCode::InvalidInputs, "L12merge2 bound: alpha must exceed 2");
  require(eta > 0.0 && eta < 1.0, ErrorCode::InvalidInputs, "L12merge2 bound: eta must lie in (0, 1)");
  require(kappa > 0.0, ErrorCode::InvalidInputs, "L12merge2 bound: kappa must be > 0");
  require(delta > 0.0, ErrorCode::InvalidInputs, "L12merge2 bound: delta must be > 0");
  require(b > 0.0 && m > 0.0 && n >= 1 && p >= 1 && c_const >= 0.0, ErrorCode::InvalidInputs,
          "L12merge2 bound: invalid inputs");
  BoundReport r;
  r.name = "L12merge2";
  const double nn = static_cast<double>(n);
  r.inputs = {{"s", s},         {"kappa", kappa}, {"n", nn},   {"m", m},         {"p", static_cast<double>(p)},
              {"sigma", sigma}, {"A", a_const},   {"b", b},    {"eta", eta},     {"alpha", alpha},
              {"C", c_const},   {"phi_max", phi_max}, {"delta", delta}};
  const double log_np = std::log(nn * static_cast<double>(p));
  const double bracket = 1.0 + 3.0 * c_const * std::pow(b / std::sqrt(eta), (alpha - 1.0) / (alpha - 2.0));
  const double k2 = kappa * kappa;
  r.parts = {
      {"bracket", bracket},
      {"a", 4.0 * a_const * a_const * sigma * sigma * s * nn * log_np / k2 * bracket * bracket},
      {"b", 2.0 * a_const * sigma * s * nn * std::sqrt(log_np) / (k2 * std::sqrt(m)) * bracket},
      {"c", s * 4.0 * phi_max / (k2 * delta * delta) * bracket * bracket},
      {"lambda", 4.0 * a_const * sigma / (alpha * std::pow(b, alpha - 1.0)) * std::sqrt(m * log_np)},
  };
  if (a_const <= std::sqrt(2.0)) {
    r.outside_theorem = true;
    r.note = "A <= sqrt(2)";
  }
  return r;
}

BoundReport bound_ring(double s, Index p, Index n, double m, double sigma, double a_const, double kappa,
                       double phi_max) {
  require(kappa > 0.0, ErrorCode::InvalidInputs, "ring bound: kappa must be > 0");
  require(a_const > -1.0 && m > 0.0 && n >= 1 && p >= 1 && sigma >= 0.0 && s >= 0.0, ErrorCode::InvalidInputs,
          "ring bound: invalid inputs");
  BoundReport r;
  r.name = "ring";
  const double pp = static_cast<double>(p), nn = static_cast<double>(n);
  r.inputs = {{"s", s}, {"p", pp}, {"n", nn}, {"m", m}, {"sigma", sigma}, {"A", a_const}, {"kappa", kappa},
              {"phi_max", phi_max}};
  const double k2 = kappa * kappa;
  r.parts = {
      {"prediction", 64.0 * (a_const + 1.0) * sigma * sigma * s * pp / (k2 * m)},
      {"estimation", 32.0 * sigma * std::sqrt(1.0 + a_const) * s * std::sqrt(pp) / (k2 * std::sqrt(m * nn))},
      {"rank", s * 64.0 * phi_max / k2},
      {"lambda", 4.0 * sigma * std::sqrt((a_const + 1.0) * m * nn * pp)},
  };
  if (a_const <= 1.0) {
    r.outside_theorem = true;
    r.note = "A <= 1";
  }
  return r;
}

BoundReport bound_persistence(double v, Index n, Index p, double m, double eta, double b, double sum_l1_sq) {
  require(eta > 0.0 && eta < 1.0, ErrorCode::InvalidInputs, "persistence bound: eta must lie in (0, 1)");
  require(v >= 0.0 && m > 0.0 && n >= 1 && p >= 1 && b >= 0.0 && sum_l1_sq >= 0.0, ErrorCode::InvalidInputs,
          "persistence bound: invalid inputs");
  BoundReport r;
  r.name = "persistence";
  const double nn = static_cast<double>(n), pp = static_cast<double>(p);
  r.inputs = {{"V", v}, {"n", nn}, {"p", pp}, {"m", m}, {"eta", eta}, {"b", b}, {"sum_l1_sq", sum_l1_sq}};
  const double lemma_a = std::sqrt(2.0 * kE * v * std::log(nn * (pp + 1.0) * (pp + 1.0)) / (m * eta));
  const double lemma_b = lemma_a * (nn + sum_l1_sq) / (nn * m);
  const double theorem = (1.0 / m + pp * b * b / (nn * m)) * std::sqrt(16.0 * kE * v * std::log(nn * pp) / (m * eta));
  r.parts = {{"lemma_a", lemma_a}, {"lemma_b", lemma_b}, {"theorem", theorem}};
  if (n < 2) {
    r.outside_theorem = true;
    r.note = "n must exceed 1";
  }
  return r;
}

DesignConstants design_constants(const MultiTaskDataset& data) {
  DesignConstants out;
  const Index p = data.num_features();
  Vector column_energy = Vector::Zero(p);
  for (const Task& t : data.tasks()) {
    const Matrix g = t.design.transpose() * t.design / static_cast<double>(t.design.rows());
    out.phi_max = std::max(out.phi_max, spectra::sym_eigen(g).eigenvalues(0));
    column_energy += t.design.colwise().squaredNorm().transpose();
    out.tilde_lambda_x = std::max(out.tilde_lambda_x, t.design.norm());
  }
  out.lambda_x = p > 0 ? std::sqrt(column_energy.maxCoeff()) : 0.0;
  out.column_normalized = data.is_column_normalized();
  return out;
}

}  // namespace mtreg::diagnostics
