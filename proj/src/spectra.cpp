#include "mtreg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mtreg/errors.hpp"

namespace mtreg::spectra {

namespace {

constexpr double kSymmetryTol = 1e-8;
constexpr double kNegativeDustTol = 1e-8;

void require_finite(const Matrix& a, const char* what) {
  require(a.allFinite(), ErrorCode::NonFinite, std::string(what) + ": non-finite entry");
}

void require_square(const Matrix& a, const char* what) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, std::string(what) + ": matrix is not square");
}

}  // namespace

double asymmetry(const Matrix& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

SymSpectrum sym_eigen(const Matrix& a) {
  require_square(a, "sym_eigen");
  require_finite(a, "sym_eigen");
  SymSpectrum out;
  if (a.rows() == 0) return out;
  require(asymmetry(a) <= kSymmetryTol, ErrorCode::NonSymmetric,
          "asymmetry " + std::to_string(asymmetry(a)) + " exceeds tolerance");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  require(solver.info() == Eigen::Success, ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
  // Eigen returns ascending order.
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SymSpectrum psd_eigen(const Matrix& a) {
  SymSpectrum s = sym_eigen(a);
  if (s.eigenvalues.size() == 0) return s;
  const double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    double& c = s.eigenvalues(k);
    if (c < -kNegativeDustTol * scale) {
      fail(ErrorCode::IndefiniteInput, "eigenvalue " + std::to_string(c) + " is negative");
    }
    if (c < 0.0) c = 0.0;
  }
  return s;
}

double rank_tolerance(const SymSpectrum& s) {
  if (s.eigenvalues.size() == 0) return 0.0;
  return static_cast<double>(s.eigenvectors.rows()) * std::numeric_limits<double>::epsilon() *
         std::max(0.0, s.eigenvalues(0));
}

Matrix psd_power(const Matrix& a, double gamma) {
  const SymSpectrum s = psd_eigen(a);
  if (s.eigenvalues.size() == 0) return Matrix(0, 0);
  if (gamma < 0.0) {
    const double tau = rank_tolerance(s);
    return spectral_apply(s, [&](double c) { return c > tau ? std::pow(c, gamma) : 0.0; });
  }
  return spectral_apply(s, [&](double c) { return c > 0.0 ? std::pow(c, gamma) : 0.0; });
}

Matrix pinv_sqrt(const Matrix& a) { return psd_power(a, -0.5); }

double nuclear_norm(const Matrix& b) {
  require_finite(b, "nuclear_norm");
  if (b.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> solver(b);
  return solver.singularValues().sum();
}

double spectral_norm(const Matrix& b) {
  require_finite(b, "spectral_norm");
  if (b.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> solver(b);
  return solver.singularValues()(0);
}

Svd svd(const Matrix& b) {
  require_finite(b, "svd");
  Svd out;
  const Eigen::Index p = b.rows(), n = b.cols();
  if (b.size() == 0) {
    out.left = Matrix(p, 0);
    out.right = Matrix(n, 0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> solver(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = solver.singularValues();
  require(sv.allFinite() && solver.matrixU().allFinite() && solver.matrixV().allFinite(),
          ErrorCode::ConvergenceFailure, "svd produced non-finite factors");
  const double tol = static_cast<double>(std::max(p, n)) * std::numeric_limits<double>::epsilon() * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  out.left = solver.matrixU().leftCols(r);
  out.singulars = sv.head(r);
  out.right = solver.matrixV().leftCols(r);
  return out;
}

double eigvalue_directional_derivative(const Matrix& a, const Matrix& adot, Eigen::Index k) {
  require(a.rows() == adot.rows() && a.cols() == adot.cols(), ErrorCode::DimensionMismatch,
          "eigvalue_directional_derivative: A and Adot differ in shape");
  require(asymmetry(adot) <= kSymmetryTol, ErrorCode::NonSymmetric, "Adot is not symmetric");
  const SymSpectrum s = sym_eigen(a);
  const Eigen::Index p = s.eigenvalues.size();
  require(k >= 1 && k <= p, ErrorCode::InvalidArgument, "eigenvalue index out of range");
  const Eigen::Index idx = k - 1;
  const double norm2 = s.eigenvalues.cwiseAbs().maxCoeff();
  const double min_gap = 1e-6 * norm2;
  if (idx > 0 && s.eigenvalues(idx - 1) - s.eigenvalues(idx) <= min_gap) {
    fail(ErrorCode::DegenerateEigenvalue, "eigenvalue " + std::to_string(k) + " is not simple");
  }
  if (idx + 1 < p && s.eigenvalues(idx) - s.eigenvalues(idx + 1) <= min_gap) {
    fail(ErrorCode::DegenerateEigenvalue, "eigenvalue " + std::to_string(k) + " is not simple");
  }
  const Vector x = s.eigenvectors.col(idx);
  const Matrix sym_dot = 0.5 * (adot + adot.transpose());
  return x.dot(sym_dot * x);
}

Matrix complete_orthonormal(const Matrix& q) {
  const Eigen::Index p = q.rows(), r = q.cols();
  require(r <= p, ErrorCode::DimensionMismatch, "complete_orthonormal: more columns than rows");
  Matrix out(p, p);
  if (r == 0) {
    out.setIdentity();
    return out;
  }
  Eigen::HouseholderQR<Matrix> qr(q);
  const Matrix full = qr.householderQ() * Matrix::Identity(p, p);
  out.leftCols(r) = q;
  out.rightCols(p - r) = full.rightCols(p - r);
  return out;
}

}  // namespace mtreg::spectra
