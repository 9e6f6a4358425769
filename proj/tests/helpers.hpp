#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "mtreg/model.hpp"
#include "oracles.hpp"

namespace testutil {

using mtreg::Index;
using mtreg::Matrix;
using mtreg::Vector;

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = nd(gen);
  return m;
}

inline Matrix random_orthogonal(Index k, std::mt19937_64& gen) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(k, k, gen));
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  // Fix the sign convention so the draw is Haar distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < k; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

inline Matrix random_psd(Index p, Index rank, std::mt19937_64& gen) {
  const Matrix f = gaussian(p, rank, gen);
  return f * f.transpose();
}

inline mtreg::MultiTaskDataset random_dataset(Index n, Index p, Index m, std::mt19937_64& gen, double noise = 0.5) {
  std::vector<mtreg::Task> tasks;
  const Matrix b = gaussian(p, n, gen);
  for (Index i = 0; i < n; ++i) {
    mtreg::Task t;
    t.design = gaussian(m, p, gen);
    t.response = t.design * b.col(i) + noise * gaussian(m, 1, gen);
    tasks.push_back(std::move(t));
  }
  return mtreg::MultiTaskDataset(std::move(tasks));
}

inline oracle::Problem to_problem(const mtreg::MultiTaskDataset& d) {
  oracle::Problem pr;
  for (const auto& t : d.tasks()) {
    pr.x.push_back(t.design);
    pr.y.push_back(t.response);
  }
  return pr;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(MTREG_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
