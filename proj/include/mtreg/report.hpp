#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace mtreg {

enum class Termination {
  Converged,
  MaxIterations,  // NonConvergence: the best iterate is still returned
};

inline const char* to_string(Termination t) {
  return t == Termination::Converged ? "converged" : "max_iterations";
}

/// Solver diagnostics shared by the lassoes and group solvers.
struct FitReport {
  std::string penalty;
  std::vector<double> objective_trace;  // one entry per outer iteration / sweep, nonincreasing
  Eigen::Index iterations = 0;
  Eigen::Index inner_iterations = 0;
  std::vector<double> kkt_residuals;        // per task (lassoes) or per row (group)
  std::vector<Eigen::Index> active_set_sizes;
  Eigen::Index row_support = 0;
  Eigen::Index rank = 0;
  Termination termination = Termination::Converged;
  std::string norm_mode;  // lassoes only

  bool converged() const { return termination == Termination::Converged; }
  double final_objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

}  // namespace mtreg
