#pragma once

#include "snrloss/hermitian.hpp"
#include "snrloss/rng.hpp"

namespace snrloss {

/// Matrix-variate Student parameters.
struct StudentParams {
  double nu = 1.0;
  ComplexMatrix mean;
  HermitianMatrix row_cov;
  HermitianMatrix col_cov;
};

/// X = mean + row_cov^(1/2) Z col_cov^(H/2), Z with i.i.d. CN(0, 1) entries.
/// An empty `mean` means zero. Throws kNotPD.
ComplexMatrix sample_cgauss_matrix(Rng& rng, Eigen::Index n, Eigen::Index k,
                                   const ComplexMatrix& mean, const HermitianMatrix& row_cov,
                                   const HermitianMatrix& col_cov);

/// S = X X^H with X ~ CN(0, sigma, I_K). Throws kInsufficientDoF if K < N.
HermitianMatrix sample_wishart(Rng& rng, Eigen::Index n, Eigen::Index k,
                               const HermitianMatrix& sigma);

/// Wishart with real degrees of freedom dof > N - 1 and identity scale, by the
/// complex Bartlett decomposition.
HermitianMatrix sample_wishart_bartlett(Rng& rng, Eigen::Index n, double dof);

/// Complex noncentral chi-square Cchi2_k(delta); mean k + delta.
/// k may be real (k > 0) to cover the scalar laws; throws kBadParam.
double sample_cchisq(Rng& rng, double k, double delta = 0.0);

/// X = mean + Y W^(-1/2), Y ~ CN(0, row_cov, I), W ~ CW(K, nu + K - 1, col_cov^-1).
ComplexMatrix sample_matrix_t(Rng& rng, const StudentParams& params, Eigen::Index k);

/// F = S1^(1/2) S2^(-1) S1^(1/2), S1 ~ CW(N, K1, I), S2 ~ CW(N, K2, I).
HermitianMatrix sample_matrix_f(Rng& rng, Eigen::Index n, Eigen::Index k1, Eigen::Index k2);

struct WishartBlocks {
  ComplexMatrix s11_2;  ///< S11 - S12 S22^-1 S21
  ComplexMatrix s22;
  ComplexMatrix t21;  ///< S22^-1 S21
};

/// Splits S after index p (1 <= p < N). Throws kSingularBlock when S22 is not PD.
WishartBlocks partitioned_wishart_blocks(const HermitianMatrix& s, Eigen::Index p);

}  // namespace snrloss
