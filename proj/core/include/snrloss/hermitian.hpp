#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "snrloss/error.hpp"

namespace snrloss {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Filter weights, steering vectors and other length-N complex vectors.
using Weight = ComplexVector;

/// Complex N x N Hermitian matrix. Construction checks Hermitian symmetry and
/// stores the exactly symmetrized matrix (A + A^H)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Throws Error(kNotHermitian) when |a_ij - conj(a_ji)| exceeds
  /// 1e-12 * max(1, max|a_ij|).
  explicit HermitianMatrix(const ComplexMatrix& m, bool psd_hint = false);

  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix diagonal(const RealVector& d);
  /// Symmetrizes without checking; for products such as X X^H that are
  /// Hermitian by construction up to rounding.
  static HermitianMatrix from_product(const ComplexMatrix& m, bool psd_hint = true);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  bool psd_hint() const noexcept { return psd_hint_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  HermitianMatrix scaled(double c) const;
  HermitianMatrix plus(const HermitianMatrix& other) const;
  HermitianMatrix plus_rank_one(const ComplexVector& q, double scale = 1.0) const;
  HermitianMatrix plus_identity(double c) const;

 private:
  ComplexMatrix m_;
  bool psd_hint_ = false;
};

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
/// The first component of each eigenvector with magnitude above 1e-8 is real
/// and nonnegative.
struct EigenDecomp {
  RealVector values;
  ComplexMatrix vectors;
};

EigenDecomp eigh(const HermitianMatrix& a);

/// Unique Hermitian PSD square root S with S S^H = A.
/// Throws kNotPSD if an eigenvalue is below -1e-10 * lambda_max.
ComplexMatrix hermitian_sqrt(const HermitianMatrix& a);

/// Hermitian inverse square root of a positive definite matrix.
ComplexMatrix hermitian_inv_sqrt(const HermitianMatrix& a);

/// Rank-R partial Cholesky factor: N x R lower-trapezoidal G with real positive
/// diagonal, G_1 G_1^H = A_11 and G_2 G_1^H = A_21.
ComplexMatrix partial_cholesky(const HermitianMatrix& a, Eigen::Index rank);

/// N x (N-1) orthonormal basis of the orthogonal complement of v, built from a
/// Householder reflector (deterministic for a given v).
ComplexMatrix orth_complement(const ComplexVector& v);

/// Orthogonal projector onto range(A); A must have full column rank.
HermitianMatrix projector(const ComplexMatrix& a);

/// Projects v onto the orthogonal complement of range(A).
ComplexVector project_out(const ComplexMatrix& a, const ComplexVector& v);

/// Solves A x = b for Hermitian positive definite A; throws kSingular when the
/// reciprocal condition estimate is below 1e-14.
ComplexMatrix solve_pd(const HermitianMatrix& a, const ComplexMatrix& b);
/// x^H A^-1 x for positive definite A.
double inv_quad(const HermitianMatrix& a, const ComplexVector& x);

ComplexMatrix inverse_pd(const HermitianMatrix& a);

/// Lower Cholesky factor of a PD matrix; throws `code` if not PD.
ComplexMatrix cholesky_lower(const HermitianMatrix& a, ErrorCode code = ErrorCode::kNotPD);

/// Frobenius-norm distance ||A - B||_F / ||B||_F.
double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace snrloss
