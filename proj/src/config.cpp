#include "mtreg/config.hpp"

#include <set>
#include <type_traits>

#include "mtreg/errors.hpp"
#include "mtreg/io.hpp"

namespace mtreg::cli {

using nlohmann::json;

namespace {

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

template <class T>
bool matches(const json& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v.is_boolean();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) return false;
    if constexpr (std::is_unsigned_v<T>) return v.is_number_unsigned();
    return true;
  } else if constexpr (std::is_floating_point_v<T>) {
    return v.is_number();
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v.is_string();
  } else if constexpr (is_vector<T>::value) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!matches<typename T::value_type>(e)) return false;
    return true;
  } else {
    static_assert(sizeof(T) == 0, "unsupported config type");
  }
}

// Walks one JSON object, recording which keys were consumed so leftovers can
// be reported as unknown.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::MalformedInput, "config: '" + path_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!matches<T>(v)) fail(ErrorCode::MalformedInput, "config: '" + where(key) + "' has the wrong type");
    dst = v.get<T>();
  }

  template <class T>
  void get(const char* key, std::optional<T>& dst) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) {
      dst.reset();
      return;
    }
    T v{};
    seen_.erase(key);
    get(key, v);
    dst = v;
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) fail(ErrorCode::MalformedInput, "config: unknown key '" + where(key) + "'");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void with_section(Section& parent, const char* key, F&& body) {
  if (const json* j = parent.sub(key)) {
    Section s(*j, parent.where(key));
    body(s);
    s.finish();
  }
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  int version = 0;
  root.get("schema_version", version);
  if (!j.contains("schema_version")) fail(ErrorCode::MalformedInput, "config: missing schema_version");
  if (version != kSchemaVersion)
    fail(ErrorCode::MalformedInput, "config: schema_version " + std::to_string(version) + " is not supported (expected " +
                                        std::to_string(kSchemaVersion) + ")");
  c.schema_version = version;
  root.get("dataset", c.dataset);
  root.get("coefficients", c.coefficients);
  root.get("out", c.out);
  root.get("seed", c.seed);
  root.get("emit_plots", c.emit_plots);
  root.get("timestamp", c.timestamp);
  root.get("threads", c.threads);
  root.get("penalty", c.penalty);
  with_section(root, "lassoes", [&](Section& s) {
    s.get("alpha", c.lassoes.alpha);
    s.get("lambda", c.lassoes.lambda);
    s.get("norm_mode", c.lassoes.norm_mode);
    s.get("max_outer", c.lassoes.max_outer);
    s.get("max_inner", c.lassoes.max_inner);
    s.get("tol", c.lassoes.tol);
    s.get("lambda_grid", c.lassoes.lambda_grid);
  });
  with_section(root, "group", [&](Section& s) {
    s.get("lambda", c.group.lambda);
    s.get("max_sweeps", c.group.max_sweeps);
    s.get("tol", c.group.tol);
  });
  with_section(root, "ring", [&](Section& s) {
    s.get("lambda", c.ring.lambda);
    s.get("gamma", c.ring.gamma);
    s.get("zero_tol", c.ring.zero_tol);
    s.get("target_rank", c.ring.target_rank);
    s.get("lambda_factor", c.ring.lambda_factor);
    s.get("svd_refresh_every", c.ring.svd_refresh_every);
    s.get("init_scale", c.ring.init_scale);
    s.get("max_passes", c.ring.max_passes);
    s.get("tol", c.ring.tol);
  });
  with_section(root, "simulation", [&](Section& s) {
    s.get("n", c.simulation.n);
    s.get("p", c.simulation.p);
    s.get("m", c.simulation.m);
    s.get("decay_rate", c.simulation.decay_rate);
    s.get("index_origin", c.simulation.index_origin);
    s.get("noise_sigma", c.simulation.noise_sigma);
  });
  with_section(root, "table1", [&](Section& s) {
    s.get("n", c.table1.n);
    s.get("p", c.table1.p);
    s.get("m_values", c.table1.m_values);
    s.get("replicates", c.table1.replicates);
    s.get("decay_rate", c.table1.decay_rate);
    s.get("index_origin", c.table1.index_origin);
    s.get("noise_sigma", c.table1.noise_sigma);
    s.get("target_rank", c.table1.target_rank);
    s.get("zero_tol", c.table1.zero_tol);
    s.get("max_passes", c.table1.max_passes);
    s.get("tol", c.table1.tol);
  });
  with_section(root, "diagnose", [&](Section& s) {
    s.get("s", c.diagnose.s);
    s.get("c0", c.diagnose.c0);
    s.get("restarts", c.diagnose.restarts);
    s.get("steps", c.diagnose.steps);
    s.get("re2_samples", c.diagnose.re2_samples);
    s.get("kkt_rel_tol", c.diagnose.kkt_rel_tol);
  });
  with_section(root, "bounds", [&](Section& s) {
    s.get("kind", c.bounds.kind);
    if (const json* in = s.sub("inputs")) {
      if (!in->is_object()) fail(ErrorCode::MalformedInput, "config: 'bounds.inputs' must be an object");
      for (const auto& [key, v] : in->items()) {
        if (!v.is_number()) fail(ErrorCode::MalformedInput, "config: 'bounds.inputs." + key + "' must be a number");
        c.bounds.inputs[key] = v.get<double>();
      }
    }
  });
  root.finish();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["dataset"] = c.dataset;
  j["coefficients"] = c.coefficients;
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["emit_plots"] = c.emit_plots;
  j["timestamp"] = c.timestamp;
  j["threads"] = c.threads;
  j["penalty"] = c.penalty;
  j["lassoes"] = {{"alpha", c.lassoes.alpha},         {"lambda", opt(c.lassoes.lambda)},
                  {"norm_mode", c.lassoes.norm_mode}, {"max_outer", c.lassoes.max_outer},
                  {"max_inner", c.lassoes.max_inner}, {"tol", c.lassoes.tol},
                  {"lambda_grid", c.lassoes.lambda_grid}};
  j["group"] = {{"lambda", c.group.lambda}, {"max_sweeps", c.group.max_sweeps}, {"tol", c.group.tol}};
  j["ring"] = {{"lambda", opt(c.ring.lambda)},
               {"gamma", c.ring.gamma},
               {"zero_tol", c.ring.zero_tol},
               {"target_rank", opt(c.ring.target_rank)},
               {"lambda_factor", c.ring.lambda_factor},
               {"svd_refresh_every", c.ring.svd_refresh_every},
               {"init_scale", c.ring.init_scale},
               {"max_passes", c.ring.max_passes},
               {"tol", c.ring.tol}};
  j["simulation"] = {{"n", c.simulation.n},
                     {"p", c.simulation.p},
                     {"m", c.simulation.m},
                     {"decay_rate", c.simulation.decay_rate},
                     {"index_origin", c.simulation.index_origin},
                     {"noise_sigma", c.simulation.noise_sigma}};
  j["table1"] = {{"n", c.table1.n},
                 {"p", c.table1.p},
                 {"m_values", c.table1.m_values},
                 {"replicates", c.table1.replicates},
                 {"decay_rate", c.table1.decay_rate},
                 {"index_origin", c.table1.index_origin},
                 {"noise_sigma", c.table1.noise_sigma},
                 {"target_rank", c.table1.target_rank},
                 {"zero_tol", c.table1.zero_tol},
                 {"max_passes", c.table1.max_passes},
                 {"tol", c.table1.tol}};
  j["diagnose"] = {{"s", c.diagnose.s},
                   {"c0", c.diagnose.c0},
                   {"restarts", c.diagnose.restarts},
                   {"steps", c.diagnose.steps},
                   {"re2_samples", c.diagnose.re2_samples},
                   {"kkt_rel_tol", c.diagnose.kkt_rel_tol}};
  j["bounds"] = {{"kind", c.bounds.kind}, {"inputs", c.bounds.inputs}};
  return j;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedInput, path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::InvalidArgument, "config: " + what);
  };
  check(c.threads >= 1, "threads must be >= 1");
  check(c.penalty == "lassoes" || c.penalty == "group" || c.penalty == "ring",
        "penalty must be lassoes, group or ring");
  check(!c.out.empty(), "out must be non-empty");
  check(c.table1.replicates >= 1, "table1.replicates must be >= 1");
  check(!c.table1.m_values.empty(), "table1.m_values must be non-empty");
  check(c.diagnose.s >= 1, "diagnose.s must be >= 1");
  check(c.diagnose.c0 > 0.0, "diagnose.c0 must be > 0");
}

}  // namespace mtreg::cli
