#pragma once

#include <iosfwd>

#include "mtreg/config.hpp"

namespace mtreg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitConvergence = 3,
  kExitInternal = 4,
};

/// Entry point shared by the executable and the tests.
/// Commands: fit, simulate, reproduce-table1, diagnose, bounds.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_reproduce_table1(const RunConfig& cfg, std::ostream& out);
int cmd_diagnose(const RunConfig& cfg, std::ostream& out);
int cmd_bounds(const RunConfig& cfg, std::ostream& out);

}  // namespace mtreg::cli
