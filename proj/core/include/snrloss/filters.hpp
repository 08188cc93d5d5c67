#pragma once

#include <vector>

#include "snrloss/hermitian.hpp"
#include "snrloss/rng.hpp"
#include "snrloss/scenario.hpp"

namespace snrloss {

enum class TransformStyle { kGeneral, kGsc };

/// Reduced-dimension transform T (N x (R+1)). For the gsc style T = [w_wnmf, V_perp Psi]
/// and `psi` keeps the (N-1) x R block.
struct Transform {
  ComplexMatrix matrix;
  TransformStyle style = TransformStyle::kGeneral;
  ComplexMatrix psi;

  Eigen::Index rank() const { return matrix.cols() - 1; }
};

/// v / ||v||^2
Weight w_wnmf(const ComplexVector& v);

/// Rescales w so that w^H v = 1. Throws kDegenerateProjection when w^H v vanishes.
Weight distortionless(const Weight& w, const ComplexVector& v);

Weight w_optimal(const HermitianMatrix& sigma, const ComplexVector& v);
Weight w_smi(const HermitianMatrix& st, const ComplexVector& v);

Transform make_gsc_transform(const ComplexVector& v, const ComplexMatrix& psi);
/// Psi with i.i.d. CN(0, 1) entries.
Transform make_random_gsc_transform(Rng& rng, const ComplexVector& v, Eigen::Index r);
Transform make_general_transform(const ComplexMatrix& t);

/// T (T^H S T)^-1 T^H v, distortionless.
Weight w_partial(const Transform& t, const HermitianMatrix& st, const ComplexVector& v);

/// Sidelobe-canceller form w_wnmf - V_perp Psi (Psi^H V_perp^H S V_perp Psi)^-1 Psi^H V_perp^H S w_wnmf.
/// Throws kSingularBlock.
Weight w_gsc(const ComplexMatrix& psi, const HermitianMatrix& st, const ComplexVector& v);

/// v minus its projection on the R principal eigenvectors of S, distortionless.
Weight w_eigencanceler(const HermitianMatrix& st, const ComplexVector& v, Eigen::Index r);

/// Projection of v off the range of the rank-R partial Cholesky factor of S.
Weight w_pchol(const HermitianMatrix& st, const ComplexVector& v, Eigen::Index r);

/// (S + K mu I)^-1 v, distortionless.
Weight w_diagonal_loading(const HermitianMatrix& st, const ComplexVector& v, double mu, Eigen::Index k);

/// Average of L gsc filters with Gaussian Psi_l ((N-1) x R).
Weight w_marzetta(Rng& rng, const HermitianMatrix& st, const ComplexVector& v, Eigen::Index r,
                  Eigen::Index l);
Weight w_marzetta(const std::vector<ComplexMatrix>& psis, const HermitianMatrix& st,
                  const ComplexVector& v);

/// Draws the SMI weight directly from its stochastic representation for a
/// Gaussian scenario (uses ct; the MPDR factor arises from ct itself).
Weight weight_rep(Rng& rng, const Scenario& scenario, Eigen::Index k);

/// E ||w_smi||^2 for training covariance ct. Throws kBadParam if K < N.
double expected_wnorm(const HermitianMatrix& ct, const ComplexVector& v, Eigen::Index k);

}  // namespace snrloss
