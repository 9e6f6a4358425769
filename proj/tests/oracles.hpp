#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the library's solvers or its Eigen-backed decompositions.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Eig {
  Vector values;   // nonincreasing
  Matrix vectors;
};

/// Cyclic Jacobi eigen-solver for symmetric matrices.
Eig jacobi_eigen(const Matrix& a, double tol = 1e-15, int max_sweeps = 100);

struct Svd {
  Matrix u;        // p x k
  Vector s;        // k = min(p, n), nonincreasing
  Matrix v;        // n x k
};

/// One-sided (Hestenes) Jacobi SVD.
Svd jacobi_svd(const Matrix& b, double tol = 1e-15, int max_sweeps = 100);

double nuclear(const Matrix& b);

/// Golden-section minimum of a unimodal function on [lo, hi] after a coarse grid scan.
double minimize_1d(const std::function<double(double)>& f, double lo, double hi, int grid = 2001);

struct Problem {
  std::vector<Matrix> x;
  std::vector<Vector> y;
  long p() const { return x.front().cols(); }
  long n() const { return static_cast<long>(x.size()); }
};

double loss(const Problem& pr, const Matrix& b);

/// min ||y - X beta||^2 + lambda * N(beta)^alpha with N = shift + ||beta||_1,
/// via a golden search over t = ||beta||_1 and accelerated projected gradient
/// onto the l1 ball of radius t.
double lassoes_task(const Matrix& x, const Vector& y, double lambda, double alpha, double shift, Vector* argmin = nullptr);

/// Accelerated proximal gradient with block soft-thresholding on rows.
double group_lasso(const Problem& pr, double lambda, int iters = 20000, Matrix* argmin = nullptr);

/// Accelerated proximal gradient with singular-value soft-thresholding,
/// step 1 / (2 max_i ||X_i^T X_i||_2).
double ring_lasso(const Problem& pr, double lambda, int iters = 50000, Matrix* argmin = nullptr);

/// Dense random search for the restricted-eigenvalue ratio over the cone
/// ||D_{J^c}||_1 <= c0 ||D_J||_1 (single task, shared support of size s).
double re_random_search(const Matrix& x, int s, double c0, long samples, unsigned seed);

}  // namespace oracle
