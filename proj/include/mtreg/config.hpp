#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtreg/model.hpp"

namespace mtreg::cli {

inline constexpr int kSchemaVersion = 1;

struct LassoesSection {
  double alpha = 1.0;
  /// Unset means the suggested default 1.1 * sqrt(max_i m_i).
  std::optional<double> lambda;
  std::string norm_mode = "augmented";
  Index max_outer = 100;
  Index max_inner = 10000;
  double tol = 1e-9;
  /// Non-empty: choose lambda on this decreasing grid by the norm-crossing rule (alpha > 2).
  std::vector<double> lambda_grid;

  bool operator==(const LassoesSection&) const = default;
};

struct GroupSection {
  double lambda = 0.0;
  Index max_sweeps = 1000;
  double tol = 1e-9;

  bool operator==(const GroupSection&) const = default;
};

struct RingSection {
  /// Unset with target_rank set: start from the spectral norm of (X_i^T y_i).
  std::optional<double> lambda;
  double gamma = 0.5;
  double zero_tol = 1e-6;
  std::optional<Index> target_rank;
  double lambda_factor = 1.1;
  Index svd_refresh_every = 10;
  double init_scale = 1e-3;
  Index max_passes = 500;
  double tol = 1e-8;

  bool operator==(const RingSection&) const = default;
};

struct SimulationSection {
  Index n = 20;
  Index p = 20;
  Index m = 25;
  double decay_rate = 0.4;
  int index_origin = 0;
  double noise_sigma = 1.0;

  bool operator==(const SimulationSection&) const = default;
};

struct Table1Section {
  Index n = 60;
  Index p = 60;
  std::vector<Index> m_values{5, 25, 100};
  Index replicates = 5;
  double decay_rate = 0.4;
  int index_origin = 0;
  double noise_sigma = 1.0;
  Index target_rank = 10;
  double zero_tol = 1e-2;
  Index max_passes = 300;
  double tol = 1e-6;

  bool operator==(const Table1Section&) const = default;
};

struct DiagnoseSection {
  Index s = 1;
  double c0 = 3.0;
  Index restarts = 64;
  Index steps = 2000;
  Index re2_samples = 500;
  double kkt_rel_tol = 1e-4;

  bool operator==(const DiagnoseSection&) const = default;
};

struct BoundsSection {
  std::string kind = "ring";
  std::map<std::string, double> inputs;

  bool operator==(const BoundsSection&) const = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string dataset;       // manifest path (fit, diagnose)
  std::string coefficients;  // CSV path (diagnose)
  std::string out = "out";
  std::uint64_t seed = 0;
  bool emit_plots = true;
  bool timestamp = true;
  int threads = 1;
  std::string penalty = "ring";  // lassoes | group | ring
  LassoesSection lassoes;
  GroupSection group;
  RingSection ring;
  SimulationSection simulation;
  Table1Section table1;
  DiagnoseSection diagnose;
  BoundsSection bounds;

  bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types and a missing or different
/// schema_version throw MalformedInput. Absent keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

/// Range checks that do not depend on the command.
void validate(const RunConfig& c);

}  // namespace mtreg::cli
