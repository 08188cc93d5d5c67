#include "snrloss/filters.hpp"

#include <cmath>

#include "snrloss/distributions.hpp"

namespace snrloss {

namespace {

ComplexMatrix solve_block(const ComplexMatrix& m, const ComplexMatrix& b, ErrorCode code) {
  Eigen::LLT<ComplexMatrix> llt(0.5 * (m + m.adjoint()));
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw Error(code, "reduced covariance is singular");
  }
  return llt.solve(b);
}

}  // namespace

Weight w_wnmf(const ComplexVector& v) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw Error(ErrorCode::kZeroVector, "steering vector is zero");
  return v / n2;
}

Weight distortionless(const Weight& w, const ComplexVector& v) {
  const Complex c = w.dot(v);  // w^H v
  if (!(std::abs(c) > 1e-12 * w.norm() * v.norm())) {
    throw Error(ErrorCode::kDegenerateProjection, "filter is orthogonal to v");
  }
  return w / std::conj(c);
}

Weight w_optimal(const HermitianMatrix& sigma, const ComplexVector& v) {
  return distortionless(solve_pd(sigma, v), v);
}

Weight w_smi(const HermitianMatrix& st, const ComplexVector& v) {
  return distortionless(solve_pd(st, v), v);
}

Transform make_gsc_transform(const ComplexVector& v, const ComplexMatrix& psi) {
  const Eigen::Index n = v.size();
  if (psi.rows() != n - 1) throw Error(ErrorCode::kBadParam, "Psi must have N-1 rows");
  Transform t;
  t.style = TransformStyle::kGsc;
  t.psi = psi;
  t.matrix.resize(n, psi.cols() + 1);
  t.matrix.col(0) = w_wnmf(v);
  t.matrix.rightCols(psi.cols()) = orth_complement(v) * psi;
  return t;
}

Transform make_random_gsc_transform(Rng& rng, const ComplexVector& v, Eigen::Index r) {
  if (r < 1 || r >= v.size()) throw Error(ErrorCode::kBadParam, "R must lie in [1, N-1]");
  return make_gsc_transform(v, rng.complex_normal_matrix(v.size() - 1, r));
}

Transform make_general_transform(const ComplexMatrix& t) {
  Transform out;
  out.matrix = t;
  out.style = TransformStyle::kGeneral;
  return out;
}

Weight w_partial(const Transform& t, const HermitianMatrix& st, const ComplexVector& v) {
  const ComplexMatrix& m = t.matrix;
  const ComplexMatrix reduced = m.adjoint() * st.matrix() * m;
  const ComplexVector wt = solve_block(reduced, m.adjoint() * v, ErrorCode::kSingular);
  return distortionless(m * wt, v);
}

Weight w_gsc(const ComplexMatrix& psi, const HermitianMatrix& st, const ComplexVector& v) {
  const ComplexMatrix vp = orth_complement(v);
  const ComplexVector w0 = w_wnmf(v);
  const ComplexMatrix a = vp * psi;
  const ComplexMatrix sa = st.matrix() * a;
  const ComplexVector wa = solve_block(a.adjoint() * sa, sa.adjoint() * w0, ErrorCode::kSingularBlock);
  return w0 - a * wa;
}

Weight w_eigencanceler(const HermitianMatrix& st, const ComplexVector& v, Eigen::Index r) {
  if (r < 0 || r >= v.size()) throw Error(ErrorCode::kBadParam, "R must lie in [0, N-1]");
  if (r == 0) return w_wnmf(v);
  const EigenDecomp e = eigh(st);
  const ComplexMatrix u = e.vectors.leftCols(r);
  return distortionless(v - u * (u.adjoint() * v), v);
}

Weight w_pchol(const HermitianMatrix& st, const ComplexVector& v, Eigen::Index r) {
  if (r < 0 || r >= v.size()) throw Error(ErrorCode::kBadParam, "R must lie in [0, N-1]");
  if (r == 0) return w_wnmf(v);
  const ComplexMatrix g = partial_cholesky(st, r);
  return distortionless(project_out(g, v), v);
}

Weight w_diagonal_loading(const HermitianMatrix& st, const ComplexVector& v, double mu, Eigen::Index k) {
  if (!(mu >= 0.0)) throw Error(ErrorCode::kBadParam, "loading level must be nonnegative");
  return w_smi(st.plus_identity(static_cast<double>(k) * mu), v);
}

Weight w_marzetta(const std::vector<ComplexMatrix>& psis, const HermitianMatrix& st,
                  const ComplexVector& v) {
  if (psis.empty()) throw Error(ErrorCode::kBadParam, "Marzetta filter needs L >= 1");
  const ComplexMatrix vp = orth_complement(v);
  const ComplexVector w0 = w_wnmf(v);
  const ComplexVector sw0 = st.matrix() * w0;
  ComplexVector acc = ComplexVector::Zero(v.size());
  for (const ComplexMatrix& psi : psis) {
    const ComplexMatrix a = vp * psi;
    const ComplexMatrix m = a.adjoint() * st.matrix() * a;
    acc += a * solve_block(m, a.adjoint() * sw0, ErrorCode::kSingularBlock);
  }
  return w0 - acc / static_cast<double>(psis.size());
}

Weight w_marzetta(Rng& rng, const HermitianMatrix& st, const ComplexVector& v, Eigen::Index r,
                  Eigen::Index l) {
  if (r < 1 || r >= v.size()) throw Error(ErrorCode::kBadParam, "R must lie in [1, N-1]");
  if (l < 1) throw Error(ErrorCode::kBadParam, "L must be at least 1");
  std::vector<ComplexMatrix> psis;
  psis.reserve(static_cast<std::size_t>(l));
  for (Eigen::Index i = 0; i < l; ++i) psis.push_back(rng.complex_normal_matrix(v.size() - 1, r));
  return w_marzetta(psis, st, v);
}

Weight weight_rep(Rng& rng, const Scenario& scenario, Eigen::Index k) {
  if (scenario.kind == ScenarioKind::kStudent) {
    throw Error(ErrorCode::kBadParam, "weight representation needs Gaussian training data");
  }
  const HermitianMatrix& ct = scenario.ct;
  const ComplexVector& v = scenario.v;
  const Eigen::Index n = v.size();
  if (k < n) throw Error(ErrorCode::kInsufficientDoF, "K must be >= N");
  const ComplexVector civ = solve_pd(ct, v);
  const double q = civ.dot(v).real();
  const ComplexMatrix vp = orth_complement(v);
  const HermitianMatrix m = HermitianMatrix::from_product(vp.adjoint() * ct.matrix() * vp);
  const ComplexVector nvec = rng.complex_normal_matrix(n - 1, 1).col(0);
  const double vv = sample_cchisq(rng, static_cast<double>(k - n + 2));
  return civ / q - (vp * (hermitian_inv_sqrt(m) * nvec)) / std::sqrt(q * vv);
}

double expected_wnorm(const HermitianMatrix& ct, const ComplexVector& v, Eigen::Index k) {
  const Eigen::Index n = v.size();
  if (k < n) throw Error(ErrorCode::kBadParam, "expected norm needs K >= N");
  const ComplexVector civ = solve_pd(ct, v);
  const double q = civ.dot(v).real();
  const ComplexMatrix vp = orth_complement(v);
  const HermitianMatrix m = HermitianMatrix::from_product(vp.adjoint() * ct.matrix() * vp);
  const double tr = inverse_pd(m).trace().real();
  return (civ / q).squaredNorm() + tr / (q * static_cast<double>(k - n + 1));
}

}  // namespace snrloss
