#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mtreg/errors.hpp"
#include "mtreg/spectra.hpp"

using namespace mtreg;
using testutil::gaussian;

namespace {

std::mt19937_64 gen(2024);

double fro(const Matrix& a) { return a.norm(); }

}  // namespace

TEST(SymEigen, ReconstructionAndOrthonormality) {
  for (int t = 0; t < 20; ++t) {
    const Index p = 1 + t % 7;
    const Matrix s = gaussian(p, p, gen);
    const Matrix a = s + s.transpose();
    const spectra::SymSpectrum e = spectra::sym_eigen(a);
    for (Index k = 1; k < p; ++k) EXPECT_GE(e.eigenvalues(k - 1), e.eigenvalues(k));
    const Matrix rec = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
    EXPECT_LE((rec - a).norm(), 1e-9 * (1.0 + a.norm()));
    EXPECT_LE((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(p, p)).lpNorm<Eigen::Infinity>(), 1e-10);
    const oracle::Eig o = oracle::jacobi_eigen(a);
    EXPECT_LE((o.values - e.eigenvalues).lpNorm<Eigen::Infinity>(), 1e-9 * (1.0 + a.norm()));
  }
}

TEST(SymEigen, RejectsNonSymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  try {
    spectra::sym_eigen(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSymmetric);
  }
}

TEST(PsdEigen, ClampsDustRejectsIndefinite) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1e-12;
  const spectra::SymSpectrum e = spectra::psd_eigen(a);
  EXPECT_GE(e.eigenvalues.minCoeff(), 0.0);
  a(1, 1) = -1e-3;
  try {
    spectra::psd_eigen(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndefiniteInput);
  }
}

TEST(PsdPower, Examples) {
  EXPECT_LE((spectra::psd_power(Matrix::Identity(3, 3), 0.5) - Matrix::Identity(3, 3)).norm(), 1e-14);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 2;
  expect(1, 1) = 3;
  EXPECT_LE((spectra::psd_power(d, 0.5) - expect).norm(), 1e-14);
}

TEST(PsdPower, SquareRootSquaresBack) {
  for (int t = 0; t < 20; ++t) {
    const Index p = 2 + t % 5;
    const Matrix a = testutil::random_psd(p, p, gen);
    const Matrix m = spectra::psd_power(a, 0.5);
    EXPECT_LE((m * m - a).norm(), 1e-8 * (1.0 + a.norm()));
    EXPECT_LE((spectra::psd_power(m, 2.0) - a).norm(), 1e-8 * (1.0 + a.norm()));
  }
}

TEST(PsdPower, ZeroToTheZeroIsZero) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 5;
  const Matrix out = spectra::psd_power(d, 0.0);
  EXPECT_NEAR(out(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(out(1, 1), 0.0, 1e-14);
}

TEST(PinvSqrt, Examples) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4;
  const Matrix out = spectra::pinv_sqrt(d);
  EXPECT_NEAR(out(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(out(1, 1), 0.0, 1e-14);
  EXPECT_LE((spectra::pinv_sqrt(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm(), 1e-14);
}

TEST(PinvSqrt, RankDeficientIdentity) {
  for (int t = 0; t < 10; ++t) {
    const Matrix a = testutil::random_psd(4, 2, gen);
    const Matrix lhs = spectra::pinv_sqrt(a) * a;
    EXPECT_LE((lhs - spectra::psd_power(a, 0.5)).norm(), 1e-8 * (1.0 + a.norm()));
  }
}

TEST(NuclearNorm, Examples) {
  EXPECT_NEAR(spectra::nuclear_norm(Matrix::Identity(2, 2)), 2.0, 1e-14);
  Vector u = gaussian(4, 1, gen), v = gaussian(3, 1, gen);
  u.normalize();
  v.normalize();
  EXPECT_NEAR(spectra::nuclear_norm(3.0 * u * v.transpose()), 3.0, 1e-12);
}

TEST(NuclearNorm, MatchesEigenOracle) {
  for (int t = 0; t < 20; ++t) {
    const Matrix b = gaussian(4, 6, gen);
    const oracle::Eig e = oracle::jacobi_eigen(b * b.transpose());
    double expect = 0.0;
    for (Index k = 0; k < e.values.size(); ++k) expect += std::sqrt(std::max(0.0, e.values(k)));
    EXPECT_NEAR(spectra::nuclear_norm(b), expect, 1e-9);
  }
}

TEST(NuclearNorm, TwoRowClosedForm) {
  for (int t = 0; t < 20; ++t) {
    const Matrix b = gaussian(2, 1 + t % 5, gen);
    // sigma_1 sigma_2 = sqrt(det(B B^T)), with the determinant as a sum of squared 2x2 minors.
    double minors = 0.0;
    for (Index j = 0; j < b.cols(); ++j)
      for (Index k = j + 1; k < b.cols(); ++k) minors += std::pow(b(0, j) * b(1, k) - b(0, k) * b(1, j), 2);
    const double closed = std::sqrt(b.squaredNorm() + 2.0 * std::sqrt(minors));
    EXPECT_NEAR(spectra::nuclear_norm(b), closed, 1e-9);
  }
}

TEST(NuclearNorm, RotationInvarianceAndConvexity) {
  for (int t = 0; t < 20; ++t) {
    const Index p = 1 + t % 6, n = 1 + (t * 3) % 7;
    const Matrix b1 = gaussian(p, n, gen), b2 = gaussian(p, n, gen);
    const Matrix u = testutil::random_orthogonal(p, gen), r = testutil::random_orthogonal(n, gen);
    EXPECT_NEAR(spectra::nuclear_norm(u.transpose() * b1 * r), spectra::nuclear_norm(b1), 1e-9);
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      EXPECT_LE(spectra::nuclear_norm(s * b1 + (1 - s) * b2),
                s * spectra::nuclear_norm(b1) + (1 - s) * spectra::nuclear_norm(b2) + 1e-10);
    }
  }
}

TEST(Svd, Examples) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  const spectra::Svd s = spectra::svd(d);
  ASSERT_EQ(s.rank(), 2);
  EXPECT_NEAR(s.singulars(0), 3.0, 1e-14);
  EXPECT_NEAR(s.singulars(1), 1.0, 1e-14);
  EXPECT_EQ(spectra::svd(Matrix::Zero(3, 4)).rank(), 0);
}

TEST(Svd, ReconstructionAndOracle) {
  for (int t = 0; t < 20; ++t) {
    const Matrix b = gaussian(5, 3, gen);
    const spectra::Svd s = spectra::svd(b);
    EXPECT_LE(s.rank(), 3);
    const Matrix rec = s.left * s.singulars.asDiagonal() * s.right.transpose();
    EXPECT_LE((rec - b).norm(), 1e-9 * (1.0 + fro(b)));
    EXPECT_LE((s.left.transpose() * s.left - Matrix::Identity(s.rank(), s.rank())).norm(), 1e-10);
    EXPECT_LE((s.right.transpose() * s.right - Matrix::Identity(s.rank(), s.rank())).norm(), 1e-10);
    const oracle::Svd o = oracle::jacobi_svd(b);
    EXPECT_LE((o.s.head(s.rank()) - s.singulars).lpNorm<Eigen::Infinity>(), 1e-10 * (1 + fro(b)));
  }
}

TEST(EigDerivative, Examples) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2;
  a(1, 1) = 1;
  Matrix d1 = Matrix::Zero(2, 2);
  d1(0, 0) = 1;
  Matrix d2(2, 2);
  d2 << 0, 1, 1, 0;
  EXPECT_NEAR(spectra::eigvalue_directional_derivative(a, d1, 1), 1.0, 1e-14);
  EXPECT_NEAR(spectra::eigvalue_directional_derivative(a, d2, 1), 0.0, 1e-14);
}

TEST(EigDerivative, DegenerateThrows) {
  try {
    spectra::eigvalue_directional_derivative(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateEigenvalue);
  }
}

TEST(EigDerivative, MatchesFiniteDifference) {
  for (int t = 0; t < 20; ++t) {
    const Index p = 3 + t % 3;
    const Matrix a = testutil::random_psd(p, p, gen);
    const Matrix s = gaussian(p, p, gen);
    const Matrix adot = 0.5 * (s + s.transpose());
    const double h = 1e-6;
    for (Index k = 1; k <= p; ++k) {
      double analytic = 0.0;
      try {
        analytic = spectra::eigvalue_directional_derivative(a, adot, k);
      } catch (const Error&) {
        continue;
      }
      const double fd = (oracle::jacobi_eigen(a + h * adot).values(k - 1) -
                         oracle::jacobi_eigen(a - h * adot).values(k - 1)) / (2 * h);
      EXPECT_NEAR(analytic, fd, 1e-4);
    }
  }
}

TEST(CompleteOrthonormal, ProducesOrthogonalMatrix) {
  const Matrix q = testutil::random_orthogonal(5, gen).leftCols(2);
  const Matrix full = spectra::complete_orthonormal(q);
  EXPECT_LE((full.transpose() * full - Matrix::Identity(5, 5)).norm(), 1e-10);
  EXPECT_LE((full.leftCols(2) - q).norm(), 1e-12);
}
