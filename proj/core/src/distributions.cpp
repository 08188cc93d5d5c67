#include "snrloss/distributions.hpp"

#include <cmath>

namespace snrloss {

ComplexMatrix sample_cgauss_matrix(Rng& rng, Eigen::Index n, Eigen::Index k,
                                   const ComplexMatrix& mean, const HermitianMatrix& row_cov,
                                   const HermitianMatrix& col_cov) {
  if (row_cov.dim() != n || col_cov.dim() != k) {
    throw Error(ErrorCode::kBadParam, "covariance dimensions do not match N x K");
  }
  const ComplexMatrix lr = cholesky_lower(row_cov, ErrorCode::kNotPD);
  const ComplexMatrix lc = cholesky_lower(col_cov, ErrorCode::kNotPD);
  ComplexMatrix x = lr * rng.complex_normal_matrix(n, k) * lc.adjoint();
  if (mean.size() != 0) {
    if (mean.rows() != n || mean.cols() != k) throw Error(ErrorCode::kBadParam, "mean shape");
    x += mean;
  }
  return x;
}

HermitianMatrix sample_wishart(Rng& rng, Eigen::Index n, Eigen::Index k,
                               const HermitianMatrix& sigma) {
  if (k < n) throw Error(ErrorCode::kInsufficientDoF, "Wishart requires K >= N");
  const ComplexMatrix l = cholesky_lower(sigma, ErrorCode::kNotPD);
  const ComplexMatrix x = l * rng.complex_normal_matrix(n, k);
  return HermitianMatrix::from_product(x * x.adjoint());
}

HermitianMatrix sample_wishart_bartlett(Rng& rng, Eigen::Index n, double dof) {
  if (!(dof > static_cast<double>(n) - 1.0)) {
    throw Error(ErrorCode::kInsufficientDoF, "Bartlett Wishart requires dof > N - 1");
  }
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i, i) = std::sqrt(rng.gamma(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) l(i, j) = rng.complex_normal();
  }
  return HermitianMatrix::from_product(l * l.adjoint());
}

double sample_cchisq(Rng& rng, double k, double delta) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorCode::kBadParam, "Cchi2 needs k > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kBadParam, "Cchi2 needs delta >= 0");
  }
  if (delta == 0.0) return rng.gamma(k);
  if (k >= 1.0) {
    // One component carries the whole mean.
    const Complex z = std::sqrt(delta) + rng.complex_normal();
    const double rest = k > 1.0 ? rng.gamma(k - 1.0) : 0.0;
    return std::norm(z) + rest;
  }
  const auto j = rng.poisson(delta);
  return rng.gamma(k + static_cast<double>(j));
}

ComplexMatrix sample_matrix_t(Rng& rng, const StudentParams& params, Eigen::Index k) {
  const Eigen::Index n = params.row_cov.dim();
  if (params.col_cov.dim() != k) throw Error(ErrorCode::kBadParam, "col_cov must be K x K");
  if (!(params.nu > 0.0)) throw Error(ErrorCode::kBadParam, "nu must be positive");
  const ComplexMatrix lr = cholesky_lower(params.row_cov, ErrorCode::kNotPD);
  // W ~ CW(K, nu + K - 1, col_cov^-1) = L^-H W0 L^-1 with col_cov = L L^H.
  const ComplexMatrix lc = cholesky_lower(params.col_cov, ErrorCode::kNotPD);
  const HermitianMatrix w0 = sample_wishart_bartlett(rng, k, params.nu + static_cast<double>(k) - 1.0);
  const ComplexMatrix lc_inv = lc.triangularView<Eigen::Lower>().solve(ComplexMatrix::Identity(k, k));
  const HermitianMatrix w = HermitianMatrix::from_product(lc_inv.adjoint() * w0.matrix() * lc_inv);
  const ComplexMatrix y = lr * rng.complex_normal_matrix(n, k);
  ComplexMatrix x = y * hermitian_inv_sqrt(w);
  if (params.mean.size() != 0) x += params.mean;
  return x;
}

HermitianMatrix sample_matrix_f(Rng& rng, Eigen::Index n, Eigen::Index k1, Eigen::Index k2) {
  const HermitianMatrix id = HermitianMatrix::identity(n);
  const HermitianMatrix s1 = sample_wishart(rng, n, k1, id);
  const HermitianMatrix s2 = sample_wishart(rng, n, k2, id);
  const ComplexMatrix r = hermitian_sqrt(s1);
  return HermitianMatrix::from_product(r * solve_pd(s2, r));
}

WishartBlocks partitioned_wishart_blocks(const HermitianMatrix& s, Eigen::Index p) {
  const Eigen::Index n = s.dim();
  if (p < 1 || p >= n) throw Error(ErrorCode::kBadParam, "split index must satisfy 1 <= P < N");
  const Eigen::Index q = n - p;
  const ComplexMatrix& m = s.matrix();
  WishartBlocks out;
  out.s22 = m.bottomRightCorner(q, q);
  Eigen::LLT<ComplexMatrix> llt(out.s22);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw Error(ErrorCode::kSingularBlock, "S22 is not positive definite");
  }
  out.t21 = llt.solve(m.bottomLeftCorner(q, p));
  out.s11_2 = m.topLeftCorner(p, p) - m.topRightCorner(p, q) * out.t21;
  out.s11_2 = 0.5 * (out.s11_2 + out.s11_2.adjoint()).eval();
  return out;
}

}  // namespace snrloss
