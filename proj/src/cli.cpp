#include "mtreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtreg/diagnostics.hpp"
#include "mtreg/errors.hpp"
#include "mtreg/group.hpp"
#include "mtreg/io.hpp"
#include "mtreg/lassoes.hpp"
#include "mtreg/ring.hpp"
#include "mtreg/simgen.hpp"
#include "mtreg/svg.hpp"

namespace mtreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json number_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(finite_or_null(x));
  return a;
}

std::vector<double> iota_double(std::size_t count, double start = 0.0) {
  std::vector<double> x(count);
  for (std::size_t k = 0; k < count; ++k) x[k] = start + static_cast<double>(k);
  return x;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

void write_plot(const RunConfig& cfg, const fs::path& path, const svg::Plot& plot) {
  if (!cfg.emit_plots) return;
  io::write_text(path, svg::render(plot, cfg.timestamp ? std::optional(svg::utc_timestamp()) : std::nullopt));
}

json bound_to_json(const diagnostics::BoundReport& r) {
  json j;
  j["name"] = r.name;
  json inputs = json::object(), parts = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = finite_or_null(v);
  for (const auto& [k, v] : r.parts) parts[k] = finite_or_null(v);
  j["inputs"] = inputs;
  j["parts"] = parts;
  j["observed"] = r.observed ? finite_or_null(*r.observed) : json(nullptr);
  j["satisfied"] = r.satisfied ? json(*r.satisfied) : json(nullptr);
  j["outside_theorem"] = r.outside_theorem;
  j["note"] = r.note;
  return j;
}

double objective_plot_floor(const std::vector<double>& trace) {
  double lo = trace.empty() ? 0.0 : trace.back();
  for (double v : trace) lo = std::min(lo, v);
  return lo;
}

MultiTaskDataset load_dataset(const RunConfig& cfg) {
  require(!cfg.dataset.empty(), ErrorCode::InvalidArgument, "no dataset given (config key 'dataset' or --dataset)");
  return io::read_dataset(cfg.dataset);
}

double max_rows(const MultiTaskDataset& data) {
  Index m = 0;
  for (Index i = 0; i < data.num_tasks(); ++i) m = std::max(m, data.rows(i));
  return static_cast<double>(m);
}

lassoes::Options lassoes_options(const RunConfig& cfg, const MultiTaskDataset& data, std::string* source) {
  lassoes::Options o;
  o.alpha = cfg.lassoes.alpha;
  o.norm_mode = lassoes::norm_mode_from_string(cfg.lassoes.norm_mode);
  o.max_outer = cfg.lassoes.max_outer;
  o.max_inner = cfg.lassoes.max_inner;
  o.tol = cfg.lassoes.tol;
  o.threads = cfg.threads;
  if (cfg.lassoes.lambda) {
    o.lambda = *cfg.lassoes.lambda;
    if (source) *source = "config";
  } else {
    o.lambda = 1.1 * std::sqrt(max_rows(data));
    if (source) *source = "suggested 1.1*sqrt(m)";
  }
  return o;
}

ring::Options ring_options(const RunConfig& cfg, const MultiTaskDataset& data) {
  ring::Options o;
  o.gamma = cfg.ring.gamma;
  o.zero_tol = cfg.ring.zero_tol;
  o.target_rank = cfg.ring.target_rank;
  o.lambda_factor = cfg.ring.lambda_factor;
  o.svd_refresh_every = cfg.ring.svd_refresh_every;
  o.init_scale = cfg.ring.init_scale;
  o.max_passes = cfg.ring.max_passes;
  o.tol = cfg.ring.tol;
  o.seed = cfg.seed;
  if (cfg.ring.lambda) {
    o.lambda = *cfg.ring.lambda;
  } else {
    require(cfg.ring.target_rank.has_value(), ErrorCode::InvalidArgument,
            "ring: set ring.lambda, or ring.target_rank for lambda tuning");
    o.lambda = simgen::default_start_lambda(data);
  }
  return o;
}

}  // namespace

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const MultiTaskDataset data = load_dataset(cfg);
  const fs::path dir = cfg.out;
  fs::create_directories(dir);
  const Index p = data.num_features(), n = data.num_tasks();

  CoefMatrix coef;
  json report;
  std::vector<double> trace;
  bool converged = true;
  report["penalty"] = cfg.penalty;
  report["n"] = n;
  report["p"] = p;

  if (cfg.penalty == "lassoes") {
    std::string source;
    lassoes::Options o = lassoes_options(cfg, data, &source);
    if (!cfg.lassoes.lambda_grid.empty()) {
      const lassoes::LambdaSelection sel = lassoes::select_lambda(data, o.alpha, cfg.lassoes.lambda_grid, o);
      json path = json::array();
      for (const auto& pt : sel.path)
        path.push_back({{"lambda", pt.lambda}, {"mean_sq_l1", pt.mean_sq_l1}, {"curve", pt.curve}});
      report["selection"] = {{"index", sel.index}, {"no_crossing", sel.no_crossing}, {"path", path}};
      o.lambda = sel.lambda;
      source = "selected on grid";
    }
    const lassoes::Fit fit = lassoes::fit(data, o);
    coef = fit.coef;
    trace = fit.report.objective_trace;
    converged = fit.report.converged();
    report["lambda"] = o.lambda;
    report["lambda_source"] = source;
    report["alpha"] = o.alpha;
    report["norm_mode"] = fit.report.norm_mode;
    report["iterations"] = fit.report.iterations;
    report["inner_iterations"] = fit.report.inner_iterations;
    report["kkt_residuals"] = number_array(fit.report.kkt_residuals);
    report["active_set_sizes"] = fit.report.active_set_sizes;
    report["termination"] = to_string(fit.report.termination);
  } else if (cfg.penalty == "group") {
    group::Options o;
    o.lambda = cfg.group.lambda;
    o.max_sweeps = cfg.group.max_sweeps;
    o.tol = cfg.group.tol;
    const group::Fit fit = group::fit(data, o);
    coef = fit.coef;
    trace = fit.report.objective_trace;
    converged = fit.report.converged();
    const group::ZeroCertificate zc = group::zero_certificate(data, o.lambda);
    report["lambda"] = o.lambda;
    report["sweeps"] = fit.report.iterations;
    report["row_support"] = fit.report.row_support;
    report["kkt_residuals"] = number_array(fit.report.kkt_residuals);
    report["zero_certificate"] = {{"holds", zc.holds},
                                  {"raw_margins", number_array(zc.raw_margins)},
                                  {"rescaled_margins", number_array(zc.rescaled_margins)}};
    report["termination"] = to_string(fit.report.termination);
    const Vector norms = coef.rowwise().norm();
    write_plot(cfg, dir / "row_norms.svg",
               {"Row norms", "feature", "||b_l||_2", false,
                {{"", iota_double(static_cast<std::size_t>(p)), to_std(norms), true}}});
  } else {
    const ring::Options o = ring_options(cfg, data);
    const ring::Fit fit = ring::fit(data, o);
    coef = fit.coef;
    trace = fit.report.objective_trace;
    converged = fit.report.converged();
    const ring::KktResiduals kkt = ring::kkt_residuals(coef, data, fit.report.final_lambda);
    const spectra::Svd s = spectra::svd(coef);
    report["lambda"] = o.lambda;
    report["final_lambda"] = fit.report.final_lambda;
    report["tuned"] = o.target_rank.has_value();
    report["passes"] = fit.report.passes;
    report["best_pass"] = fit.report.best_pass;
    report["rank"] = ring::numerical_rank(coef);
    report["singular_values"] = to_std(s.singulars);
    report["rank_trace"] = fit.report.rank_trace;
    report["coordinate_count_trace"] = fit.report.coordinate_count_trace;
    report["singular_count_trace"] = fit.report.singular_count_trace;
    report["lambda_trace"] = fit.report.lambda_trace;
    report["truncated_directions"] = fit.report.truncated_directions;
    report["polish_iterations"] = fit.report.polish_iterations;
    report["max_accumulation_drift"] = fit.report.max_accumulation_drift;
    report["kkt"] = {{"active", number_array(kkt.active)},
                     {"inactive", number_array(kkt.inactive)},
                     {"r_frobenius", kkt.r_frobenius},
                     {"certified", kkt.certified(fit.report.final_lambda)}};
    report["termination"] = to_string(fit.report.termination);
    write_plot(cfg, dir / "singular_values.svg",
               {"Singular values", "index", "singular value", false,
                {{"", iota_double(static_cast<std::size_t>(s.singulars.size()), 1.0), to_std(s.singulars), true}}});
  }
  report["objective_trace"] = number_array(trace);
  report["final_objective"] = trace.empty() ? json(nullptr) : finite_or_null(trace.back());
  report["converged"] = converged;

  io::write_csv_matrix(dir / "coefficients.csv", coef);
  write_json(dir / "report.json", report);
  if (!trace.empty()) {
    // Excess over the smallest value, so a log axis shows the approach to the optimum.
    const double lo = objective_plot_floor(trace);
    std::vector<double> excess;
    for (double v : trace) excess.push_back(v - lo);
    write_plot(cfg, dir / "objective.svg",
               {"Objective trace", "iteration", "objective - min", true,
                {{cfg.penalty, iota_double(trace.size()), excess, false}}});
  }
  out << "fit " << cfg.penalty << ": objective " << io::format_double(trace.empty() ? 0.0 : trace.back())
      << (converged ? ", converged" : ", NOT converged (best iterate written)") << "\n";
  return converged ? kExitOk : kExitConvergence;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  simgen::SimConfig sc;
  sc.n = cfg.simulation.n;
  sc.p = cfg.simulation.p;
  sc.m = cfg.simulation.m;
  sc.decay_rate = cfg.simulation.decay_rate;
  sc.index_origin = cfg.simulation.index_origin;
  sc.noise_sigma = cfg.simulation.noise_sigma;
  sc.seed = cfg.seed;
  const simgen::Simulation sim = simgen::gen_decay(sc);
  const fs::path dir = cfg.out;
  const fs::path manifest = io::write_dataset(dir / "data", sim.data);
  io::write_csv_matrix(dir / "truth.csv", sim.truth.true_coef);
  json summary;
  summary["manifest"] = manifest.lexically_relative(dir).generic_string();
  summary["seed"] = cfg.seed;
  summary["n"] = sc.n;
  summary["p"] = sc.p;
  summary["m"] = sc.m;
  summary["decay_rate"] = sc.decay_rate;
  summary["index_origin"] = sc.index_origin;
  summary["noise_sigma"] = sc.noise_sigma;
  summary["theoretical_r2"] = simgen::theoretical_r2(sc.p, sc.decay_rate, sc.index_origin, sc.noise_sigma);
  summary["empirical_r2"] = simgen::empirical_r2(sim);
  write_json(dir / "summary.json", summary);
  if (cfg.emit_plots) {
    const Vector sd = sim.truth.true_coef.rowwise().norm() / std::sqrt(static_cast<double>(sc.n));
    write_plot(cfg, dir / "coefficient_scale.svg",
               {"Coefficient scale by feature", "feature", "rms over tasks", true,
                {{"", iota_double(static_cast<std::size_t>(sc.p)), to_std(sd), true}}});
  }
  out << "simulate: wrote " << manifest.string() << "\n";
  return kExitOk;
}

int cmd_reproduce_table1(const RunConfig& cfg, std::ostream& out) {
  simgen::Table1Options o;
  o.base.n = cfg.table1.n;
  o.base.p = cfg.table1.p;
  o.base.decay_rate = cfg.table1.decay_rate;
  o.base.index_origin = cfg.table1.index_origin;
  o.base.noise_sigma = cfg.table1.noise_sigma;
  o.base.seed = cfg.seed;
  o.m_values = cfg.table1.m_values;
  o.replicates = cfg.table1.replicates;
  o.threads = cfg.threads;
  o.ring = simgen::table1_ring_defaults();
  o.ring.target_rank = cfg.table1.target_rank;
  o.ring.zero_tol = cfg.table1.zero_tol;
  o.ring.max_passes = cfg.table1.max_passes;
  o.ring.tol = cfg.table1.tol;
  const simgen::Table1 t = simgen::run_table1(o);

  const fs::path dir = cfg.out;
  std::string table = "m,replicates,l_par_mean,l_par_sd,l_pre_mean,l_pre_sd\n";
  for (const auto& r : t.rows) {
    table += std::to_string(r.m) + "," + std::to_string(r.replicates) + "," + io::format_double(r.l_par_mean) + "," +
             io::format_double(r.l_par_sd) + "," + io::format_double(r.l_pre_mean) + "," +
             io::format_double(r.l_pre_sd) + "\n";
  }
  io::write_text(dir / "table1.csv", table);
  std::string reps = "m,replicate,seed,l_par,l_pre,final_lambda,rank,coordinate_count,passes,converged\n";
  for (const auto& r : t.replicates) {
    reps += std::to_string(r.m) + "," + std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," +
            io::format_double(r.metrics.l_par) + "," + io::format_double(r.metrics.l_pre) + "," +
            io::format_double(r.final_lambda) + "," + std::to_string(r.rank) + "," +
            std::to_string(r.coordinate_count) + "," + std::to_string(r.passes) + "," + (r.converged ? "1" : "0") +
            "\n";
  }
  io::write_text(dir / "table1_replicates.csv", reps);
  if (cfg.emit_plots) {
    std::vector<double> ms, lpar, lpre;
    for (const auto& r : t.rows) {
      ms.push_back(static_cast<double>(r.m));
      lpar.push_back(r.l_par_mean);
      lpre.push_back(r.l_pre_mean);
    }
    write_plot(cfg, dir / "table1.svg",
               {"Estimation error against sample size", "m", "mean error", false,
                {{"L_par", ms, lpar, true}, {"L_pre", ms, lpre, true}}});
  }
  out << table;
  return kExitOk;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const MultiTaskDataset data = load_dataset(cfg);
  require(!cfg.coefficients.empty(), ErrorCode::InvalidArgument,
          "no coefficients given (config key 'coefficients' or --coefficients)");
  const Matrix coef = io::read_csv_matrix(cfg.coefficients, data.num_tasks());
  require(coef.rows() == data.num_features(), ErrorCode::MalformedInput,
          cfg.coefficients + ": expected " + std::to_string(data.num_features()) + " rows, found " +
              std::to_string(coef.rows()));
  const double rel = cfg.diagnose.kkt_rel_tol;
  json j;
  j["penalty"] = cfg.penalty;
  bool all_pass = true;
  auto line = [&](const std::string& name, double value, double tol) {
    const bool pass = value <= tol;
    all_pass = all_pass && pass;
    out << (pass ? "PASS " : "FAIL ") << name << " = " << io::format_double(value) << " (tol "
        << io::format_double(tol) << ")\n";
    return json{{"name", name}, {"value", finite_or_null(value)}, {"tol", tol}, {"pass", pass}};
  };
  json checks = json::array();
  const double r_norm = 2.0 * residual_correlations(coef, data).norm();
  if (cfg.penalty == "ring") {
    require(cfg.ring.lambda.has_value(), ErrorCode::InvalidArgument, "diagnose ring: ring.lambda is required");
    const double lambda = *cfg.ring.lambda;
    const ring::KktResiduals k = ring::kkt_residuals(coef, data, lambda);
    j["lambda"] = lambda;
    j["active_rank"] = k.active_rank;
    j["active"] = number_array(k.active);
    j["inactive"] = number_array(k.inactive);
    checks.push_back(line("ring active residual", k.max_active(), rel * (1.0 + k.r_frobenius)));
    checks.push_back(line("ring inactive slack", k.max_inactive(), rel * lambda));
  } else if (cfg.penalty == "group") {
    const std::vector<double> k = group::kkt_residuals(coef, data, cfg.group.lambda);
    j["lambda"] = cfg.group.lambda;
    j["residuals"] = number_array(k);
    const double worst = k.empty() ? 0.0 : *std::max_element(k.begin(), k.end());
    checks.push_back(line("group subgradient distance", worst, rel * (1.0 + r_norm)));
  } else {
    const lassoes::Options o = lassoes_options(cfg, data, nullptr);
    const std::vector<double> k = lassoes::kkt_residual(coef, data, o);
    j["lambda"] = o.lambda;
    j["residuals"] = number_array(k);
    const double worst = k.empty() ? 0.0 : *std::max_element(k.begin(), k.end());
    checks.push_back(line("lassoes subgradient distance", worst, rel * (1.0 + r_norm)));
  }
  j["kkt_checks"] = checks;
  j["kkt_pass"] = all_pass;

  const std::vector<Matrix> blocks = diagnostics::design_blocks(data);
  diagnostics::ReOptions ro;
  ro.restarts = cfg.diagnose.restarts;
  ro.steps = cfg.diagnose.steps;
  ro.seed = cfg.seed;
  ro.threads = cfg.threads;
  json re = json::array();
  for (int q : {1, 2}) {
    const diagnostics::REEstimate e = diagnostics::re_constant(blocks, cfg.diagnose.s, cfg.diagnose.c0, q, ro);
    re.push_back({{"q", q},
                  {"s", e.s},
                  {"c0", e.c0},
                  {"kappa", e.kappa},
                  {"certified", e.certified},
                  {"method", diagnostics::to_string(e.method)},
                  {"shared_support", e.shared_support},
                  {"candidates", e.candidates}});
    out << "RE" << q << "(s=" << e.s << ", c0=" << io::format_double(e.c0) << ") kappa = " << io::format_double(e.kappa)
        << (e.certified ? " [certified]" : " [estimate]") << "\n";
  }
  diagnostics::Re2Options r2;
  r2.samples = cfg.diagnose.re2_samples;
  r2.seed = cfg.seed;
  const diagnostics::REEstimate e2 = diagnostics::re2_constant(blocks, cfg.diagnose.s, cfg.diagnose.c0, r2);
  re.push_back({{"q", 0}, {"s", e2.s}, {"c0", e2.c0}, {"kappa", e2.kappa}, {"certified", false}, {"method", "subspace"},
                {"candidates", e2.candidates}});
  out << "RE2(s=" << e2.s << ") kappa = " << io::format_double(e2.kappa) << " [estimate]\n";
  j["restricted_eigenvalues"] = re;

  const diagnostics::DesignConstants dc = diagnostics::design_constants(data);
  j["design"] = {{"phi_max", dc.phi_max},
                 {"lambda_x", dc.lambda_x},
                 {"tilde_lambda_x", dc.tilde_lambda_x},
                 {"column_normalized", dc.column_normalized}};
  out << "phi_max = " << io::format_double(dc.phi_max) << "\n";
  write_json(fs::path(cfg.out) / "diagnostics.json", j);
  return kExitOk;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  const auto& in = cfg.bounds.inputs;
  struct Spec {
    std::vector<std::string> required;
    std::map<std::string, double> defaults;
    std::string observed_part;
    std::function<diagnostics::BoundReport(const std::function<double(const std::string&)>&)> eval;
  };
  auto idx = [](double v) { return static_cast<Index>(std::llround(v)); };
  const std::map<std::string, Spec> specs = {
      {"lassoes_theorem1",
       {{"C_n", "c_n", "n", "lambda", "m", "delta", "norms0", "norms_hat"}, {}, "rhs", [&](const auto& g) {
          return diagnostics::bound_lassoes_theorem1(g("C_n"), g("c_n"), idx(g("n")), g("lambda"), g("m"), g("delta"),
                                                     g("norms0"), g("norms_hat"));
        }}},
      {"lassoL1p",
       {{"s", "kappa", "m", "n", "p", "sigma", "A", "alpha", "lambda", "B", "B_hat"}, {}, "a", [&](const auto& g) {
          return diagnostics::bound_lassoL1p(g("s"), g("kappa"), g("m"), idx(g("n")), idx(g("p")), g("sigma"), g("A"),
                                             g("alpha"), g("lambda"), g("B"), g("B_hat"));
        }}},
      {"lassoL1p_sparsity",
       {{"pred_err_sq", "m", "phi_max", "lambda", "alpha", "beta_hat_l1", "A", "sigma", "n", "p"},
        {},
        "c",
        [&](const auto& g) {
          return diagnostics::bound_lassoL1p_sparsity(g("pred_err_sq"), g("m"), g("phi_max"), g("lambda"), g("alpha"),
                                                      g("beta_hat_l1"), g("A"), g("sigma"), idx(g("n")), idx(g("p")));
        }}},
      {"L12merge2",
       {{"s", "kappa", "n", "m", "p", "sigma", "A", "b", "eta", "alpha", "phi_max", "delta"},
        {{"C", 1.0}},
        "a",
        [&](const auto& g) {
          return diagnostics::bound_L12merge2(g("s"), g("kappa"), idx(g("n")), g("m"), idx(g("p")), g("sigma"), g("A"),
                                              g("b"), g("eta"), g("alpha"), g("C"), g("phi_max"), g("delta"));
        }}},
      {"ring",
       {{"s", "p", "n", "m", "sigma", "A", "kappa"}, {{"phi_max", 1.0}}, "prediction", [&](const auto& g) {
          return diagnostics::bound_ring(g("s"), idx(g("p")), idx(g("n")), g("m"), g("sigma"), g("A"), g("kappa"),
                                         g("phi_max"));
        }}},
      {"persistence",
       {{"V", "n", "p", "m", "eta", "b"}, {{"sum_l1_sq", 0.0}}, "theorem", [&](const auto& g) {
          return diagnostics::bound_persistence(g("V"), idx(g("n")), idx(g("p")), g("m"), g("eta"), g("b"),
                                                g("sum_l1_sq"));
        }}},
  };
  const auto it = specs.find(cfg.bounds.kind);
  if (it == specs.end()) {
    std::string names;
    for (const auto& [k, _] : specs) names += (names.empty() ? "" : ", ") + k;
    fail(ErrorCode::InvalidArgument, "bounds: unknown kind '" + cfg.bounds.kind + "' (one of " + names + ")");
  }
  const Spec& spec = it->second;
  std::set<std::string> allowed(spec.required.begin(), spec.required.end());
  for (const auto& [k, _] : spec.defaults) allowed.insert(k);
  allowed.insert("observed");
  for (const auto& [k, _] : in)
    require(allowed.count(k) > 0, ErrorCode::InvalidArgument, "bounds " + cfg.bounds.kind + ": unknown input '" + k + "'");
  for (const auto& k : spec.required)
    require(in.count(k) > 0, ErrorCode::InvalidArgument, "bounds " + cfg.bounds.kind + ": missing input '" + k + "'");
  auto get = [&](const std::string& k) {
    if (const auto f = in.find(k); f != in.end()) return f->second;
    return spec.defaults.at(k);
  };
  diagnostics::BoundReport r = spec.eval(get);
  if (const auto f = in.find("observed"); f != in.end()) r.check(spec.observed_part, f->second);

  const json j = bound_to_json(r);
  write_json(fs::path(cfg.out) / ("bound_" + cfg.bounds.kind + ".json"), j);
  out << "bound " << r.name << (r.outside_theorem ? " (outside theorem: " + r.note + ")" : "") << "\n";
  for (const auto& [k, v] : r.parts) out << "  " << k << " = " << io::format_double(v) << "\n";
  if (r.satisfied) out << "  observed " << io::format_double(*r.observed) << (*r.satisfied ? " <= " : " > ") << spec.observed_part << "\n";
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task sparse regression: lassoes, group and trace-norm (RING) penalties"};
  app.require_subcommand(1);
  std::string config_path, out_dir, dataset, coefficients, penalty;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<int> threads;
  bool no_plots = false, no_timestamp = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fit", "Fit a penalized estimator to a dataset"},
      {"simulate", "Generate a decaying-variance dataset"},
      {"reproduce-table1", "Estimation-error table for tuned trace-norm fits"},
      {"diagnose", "KKT residuals, restricted-eigenvalue estimates and design constants"},
      {"bounds", "Evaluate a closed-form risk bound"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "Seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--no-plots", no_plots, "Skip SVG output");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp comment in SVG files");
    if (name == "fit" || name == "diagnose") {
      sub->add_option("--dataset", dataset, "Dataset manifest");
      sub->add_option("--penalty", penalty, "lassoes | group | ring");
      sub->add_option("--lambda", lambda, "Penalty level for the chosen penalty");
    }
    if (name == "diagnose") sub->add_option("--coefficients", coefficients, "Coefficient CSV (p rows, n columns)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (no_plots) cfg.emit_plots = false;
    if (no_timestamp) cfg.timestamp = false;
    if (threads) cfg.threads = *threads;
    if (!dataset.empty()) cfg.dataset = dataset;
    if (!coefficients.empty()) cfg.coefficients = coefficients;
    if (!penalty.empty()) cfg.penalty = penalty;
    if (lambda) {
      if (cfg.penalty == "lassoes") cfg.lassoes.lambda = *lambda;
      else if (cfg.penalty == "group") cfg.group.lambda = *lambda;
      else cfg.ring.lambda = *lambda;
    }
    validate(cfg);
    if (command == "fit") return cmd_fit(cfg, out);
    if (command == "simulate") return cmd_simulate(cfg, out);
    if (command == "reproduce-table1") return cmd_reproduce_table1(cfg, out);
    if (command == "diagnose") return cmd_diagnose(cfg, out);
    return cmd_bounds(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::MalformedInput:
      case ErrorCode::InvalidArgument:
      case ErrorCode::InvalidInputs:
      case ErrorCode::DimensionMismatch:
      case ErrorCode::NonFinite:
        return kExitInput;
      case ErrorCode::ConvergenceFailure:
        return kExitConvergence;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace mtreg::cli
