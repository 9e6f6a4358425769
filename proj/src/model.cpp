#include "mtreg/model.hpp"

#include <cmath>
#include <string>

#include "mtreg/errors.hpp"

namespace mtreg {

MultiTaskDataset::MultiTaskDataset(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
  require(!tasks_.empty(), ErrorCode::DimensionMismatch, "dataset has no tasks");
  p_ = tasks_.front().design.cols();
  require(p_ >= 1, ErrorCode::DimensionMismatch, "dataset has no features");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    const std::string tag = "task " + std::to_string(i);
    require(t.design.cols() == p_, ErrorCode::DimensionMismatch, tag + ": column count differs from task 0");
    require(t.design.rows() >= 1, ErrorCode::DimensionMismatch, tag + ": no rows");
    require(t.response.size() == t.design.rows(), ErrorCode::DimensionMismatch,
            tag + ": response length differs from design rows");
    require(t.design.allFinite() && t.response.allFinite(), ErrorCode::NonFinite, tag + ": non-finite entry");
  }
}

Index MultiTaskDataset::total_rows() const {
  Index total = 0;
  for (const Task& t : tasks_) total += t.design.rows();
  return total;
}

bool MultiTaskDataset::is_column_normalized(double tol) const {
  for (const Task& t : tasks_) {
    const double m = static_cast<double>(t.design.rows());
    const Vector energy = t.design.colwise().squaredNorm().transpose();
    if (((energy.array() - m).abs() > tol * m).any()) return false;
  }
  return true;
}

MultiTaskDataset MultiTaskDataset::permuted(const std::vector<Index>& order) const {
  require(static_cast<Index>(order.size()) == num_tasks(), ErrorCode::DimensionMismatch,
          "permutation length differs from task count");
  std::vector<Task> out;
  out.reserve(order.size());
  for (Index k : order) out.push_back(task(k));
  return MultiTaskDataset(std::move(out));
}

Vector augmented(const Vector& beta) {
  Vector out(beta.size() + 1);
  out(0) = -1.0;
  out.tail(beta.size()) = beta;
  return out;
}

Matrix empirical_cov(const Task& task, bool center) {
  const Index m = task.design.rows();
  const Index p = task.design.cols();
  require(m >= 1, ErrorCode::DimensionMismatch, "empirical_cov: task has no rows");
  Matrix z(m, p + 1);
  z.col(0) = task.response;
  z.rightCols(p) = task.design;
  if (center) z.rowwise() -= z.colwise().mean();
  Matrix s = z.transpose() * z / static_cast<double>(m);
  return 0.5 * (s + s.transpose());
}

void require_shape(const CoefMatrix& b, const MultiTaskDataset& data, const char* what) {
  require(b.rows() == data.num_features() && b.cols() == data.num_tasks(), ErrorCode::DimensionMismatch,
          std::string(what) + ": coefficient matrix is " + std::to_string(b.rows()) + "x" +
              std::to_string(b.cols()) + ", dataset needs " + std::to_string(data.num_features()) + "x" +
              std::to_string(data.num_tasks()));
}

std::vector<Vector> residuals(const CoefMatrix& b, const MultiTaskDataset& data) {
  require_shape(b, data, "residuals");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(data.num_tasks()));
  for (Index i = 0; i < data.num_tasks(); ++i) {
    const Task& t = data.task(i);
    out.push_back(t.response - t.design * b.col(i));
  }
  return out;
}

double empirical_risk(const CoefMatrix& b, const MultiTaskDataset& data) {
  double total = 0.0;
  for (const Vector& r : residuals(b, data)) total += r.squaredNorm();
  return total;
}

Matrix residual_correlations(const CoefMatrix& b, const MultiTaskDataset& data) {
  const std::vector<Vector> r = residuals(b, data);
  Matrix out(data.num_features(), data.num_tasks());
  for (Index i = 0; i < data.num_tasks(); ++i) {
    out.col(i) = data.task(i).design.transpose() * r[static_cast<std::size_t>(i)];
  }
  return out;
}

void PopTruth::validate() const {
  require(sigma >= 0.0, ErrorCode::InvalidArgument, "PopTruth: sigma must be nonnegative");
  require(moment_bound > 0.0, ErrorCode::InvalidArgument, "PopTruth: moment bound V must be positive");
  require(static_cast<Index>(pop_cov.size()) == true_coef.cols(), ErrorCode::DimensionMismatch,
          "PopTruth: one population covariance per task is required");
  for (const Matrix& s : pop_cov) {
    require(s.rows() == true_coef.rows() + 1 && s.cols() == true_coef.rows() + 1, ErrorCode::DimensionMismatch,
            "PopTruth: population covariance must be (p+1)x(p+1)");
    spectra::psd_eigen(s);
  }
}

double population_risk(const CoefMatrix& b, const PopTruth& truth) {
  require(static_cast<Index>(truth.pop_cov.size()) == b.cols(), ErrorCode::DimensionMismatch,
          "population_risk: task count differs");
  double total = 0.0;
  for (Index i = 0; i < b.cols(); ++i) {
    const Matrix& s = truth.pop_cov[static_cast<std::size_t>(i)];
    require(s.rows() == b.rows() + 1, ErrorCode::DimensionMismatch, "population_risk: feature count differs");
    const Vector bt = augmented(b.col(i));
    total += bt.dot(s * bt);
  }
  return total;
}

double sup_norm_gap(const MultiTaskDataset& data, const PopTruth& truth) {
  require(static_cast<Index>(truth.pop_cov.size()) == data.num_tasks(), ErrorCode::DimensionMismatch,
          "sup_norm_gap: task count differs");
  double gap = 0.0;
  for (Index i = 0; i < data.num_tasks(); ++i) {
    const Matrix& pop = truth.pop_cov[static_cast<std::size_t>(i)];
    require(pop.rows() == data.num_features() + 1, ErrorCode::DimensionMismatch,
            "sup_norm_gap: feature count differs");
    gap = std::max(gap, (empirical_cov(data.task(i)) - pop).cwiseAbs().maxCoeff());
  }
  return gap;
}

double lpq_norm(const Matrix& b, double p_exp, double q_exp, Axis axis) {
  require(p_exp >= 1.0 && q_exp >= 1.0, ErrorCode::InvalidArgument, "lpq_norm: exponents must be >= 1");
  require(b.allFinite(), ErrorCode::NonFinite, "lpq_norm: non-finite entry");
  const Index groups = axis == Axis::Rows ? b.rows() : b.cols();
  double outer = 0.0;
  for (Index g = 0; g < groups; ++g) {
    const Vector z = axis == Axis::Rows ? Vector(b.row(g).transpose()) : Vector(b.col(g));
    const double inner = z.array().abs().pow(p_exp).sum();
    outer += std::pow(inner, q_exp / p_exp);
  }
  return std::pow(outer, 1.0 / q_exp);
}

double default_sparsity_threshold(const CoefMatrix& b) {
  return b.size() == 0 ? 0.0 : 1e-8 * b.cwiseAbs().maxCoeff();
}

SparsitySummary sparsity_summary(const CoefMatrix& b, std::optional<double> threshold, double rank_rel_tol) {
  const double thr = threshold.value_or(default_sparsity_threshold(b));
  SparsitySummary out;
  out.task_support.resize(static_cast<std::size_t>(b.cols()));
  out.task_count.assign(static_cast<std::size_t>(b.cols()), 0);
  for (Index i = 0; i < b.cols(); ++i) {
    for (Index l = 0; l < b.rows(); ++l) {
      if (std::abs(b(l, i)) > thr) out.task_support[static_cast<std::size_t>(i)].push_back(l);
    }
    out.task_count[static_cast<std::size_t>(i)] =
        static_cast<Index>(out.task_support[static_cast<std::size_t>(i)].size());
  }
  for (Index l = 0; l < b.rows(); ++l) {
    if ((b.row(l).array().abs() > thr).any()) out.row_support.push_back(l);
  }
  if (b.size() > 0) {
    Eigen::JacobiSVD<Matrix> solver(b);
    const Vector& sv = solver.singularValues();
    if (sv(0) > 0.0) out.rank = (sv.array() > rank_rel_tol * sv(0)).count();
  }
  return out;
}

}  // namespace mtreg
