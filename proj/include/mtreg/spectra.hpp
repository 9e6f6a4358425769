#pragma once

#include <Eigen/Dense>

namespace mtreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace spectra {

/// Eigendecomposition of a symmetric matrix, eigenvalues nonincreasing.
struct SymSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;  // column k pairs with eigenvalues(k)
};

/// Thin, rank-revealing singular value decomposition B = left * diag(singulars) * right^T.
/// Only singular values above max(p, n) * eps * sigma_max are kept, so a zero
/// matrix has rank 0.
struct Svd {
  Matrix left;      // p x r
  Vector singulars; // r, nonincreasing
  Matrix right;     // n x r

  Eigen::Index rank() const { return singulars.size(); }
};

/// Max-entry norm of A - A^T relative to the max-entry norm of A.
double asymmetry(const Matrix& a);

/// Symmetric eigendecomposition. Inputs within tolerance of symmetric are
/// averaged with their transpose first; otherwise throws NonSymmetric.
SymSpectrum sym_eigen(const Matrix& a);

/// Same as sym_eigen, additionally checking positive semi-definiteness:
/// eigenvalues below -1e-8 * max(1, |c|_max) throw IndefiniteInput, the rest
/// of the negative dust is clamped to zero.
SymSpectrum psd_eigen(const Matrix& a);

/// Rank tolerance used for pseudo-powers: p * eps * largest eigenvalue.
double rank_tolerance(const SymSpectrum& s);

/// Rebuild sum_k f(c_k) x_k x_k^T from a spectrum. Zero weights are skipped.
template <class F>
Matrix spectral_apply(const SymSpectrum& s, F&& f) {
  Vector w(s.eigenvalues.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = f(s.eigenvalues(k));
  const Matrix out = s.eigenvectors * w.asDiagonal() * s.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

/// A^gamma = sum c^gamma x x^T for PSD A. For gamma < 0 only eigenvalues above
/// the rank tolerance participate (Moore-Penrose pseudo-power); 0^0 is 0.
Matrix psd_power(const Matrix& a, double gamma);

/// Moore-Penrose inverse of A^{1/2}.
Matrix pinv_sqrt(const Matrix& a);

/// Sum of singular values (trace norm, Schatten-1).
double nuclear_norm(const Matrix& b);

/// Largest singular value.
double spectral_norm(const Matrix& b);

Svd svd(const Matrix& b);

/// First-order change c_k' = x_k^T Adot x_k of the k-th largest eigenvalue
/// (k is 1-based) along the symmetric direction Adot. Throws
/// DegenerateEigenvalue unless the gap to each neighbour exceeds 1e-6 * ||A||_2.
double eigvalue_directional_derivative(const Matrix& a, const Matrix& adot, Eigen::Index k);

/// Complete the orthonormal columns of q (p x r) to a p x p orthogonal matrix.
Matrix complete_orthonormal(const Matrix& q);

}  // namespace spectra
}  // namespace mtreg
