#include "snrloss/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace snrloss {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kNotPD: return "NotPD";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kSingularPivot: return "SingularPivot";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kInsufficientDoF: return "InsufficientDoF";
    case ErrorCode::kBadParam: return "BadParam";
    case ErrorCode::kSingularBlock: return "SingularBlock";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kBadAngle: return "BadAngle";
    case ErrorCode::kDegenerateQ: return "DegenerateQ";
    case ErrorCode::kDegenerateProjection: return "DegenerateProjection";
    case ErrorCode::kNoClosedForm: return "NoClosedForm";
    case ErrorCode::kEmptySamples: return "EmptySamples";
    case ErrorCode::kUnknownFigure: return "UnknownFigure";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdRelTol = 1e-10;
constexpr double kPsdAbsFloor = 1e-12;
constexpr double kPhaseThreshold = 1e-8;
constexpr double kRcondFloor = 1e-14;

ComplexMatrix symmetrize(const ComplexMatrix& m) {
  ComplexMatrix s = 0.5 * (m + m.adjoint());
  for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, i) = Complex(s(i, i).real(), 0.0);
  return s;
}

void fix_phase(ComplexMatrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double mag = std::abs(vectors(r, c));
      if (mag > kPhaseThreshold) {
        const Complex phase = std::conj(vectors(r, c)) / mag;
        vectors.col(c) *= phase;
        vectors(r, c) = Complex(mag, 0.0);
        break;
      }
    }
  }
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, bool psd_hint) : psd_hint_(psd_hint) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::kNotHermitian, "matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw Error(ErrorCode::kNotHermitian, "non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol * scale) {
    throw Error(ErrorCode::kNotHermitian,
                "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  m_ = symmetrize(m);
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Identity(n, n), true);
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = d(i);
  return HermitianMatrix(m, (d.array() >= 0.0).all());
}

HermitianMatrix HermitianMatrix::from_product(const ComplexMatrix& m, bool psd_hint) {
  HermitianMatrix h;
  h.m_ = symmetrize(m);
  h.psd_hint_ = psd_hint;
  return h;
}

HermitianMatrix HermitianMatrix::scaled(double c) const {
  return from_product(m_ * c, psd_hint_ && c >= 0.0);
}

HermitianMatrix HermitianMatrix::plus(const HermitianMatrix& other) const {
  return from_product(m_ + other.m_, psd_hint_ && other.psd_hint_);
}

HermitianMatrix HermitianMatrix::plus_rank_one(const ComplexVector& q, double scale) const {
  return from_product(m_ + scale * q * q.adjoint(), psd_hint_ && scale >= 0.0);
}

HermitianMatrix HermitianMatrix::plus_identity(double c) const {
  ComplexMatrix m = m_;
  m.diagonal().array() += c;
  return from_product(m, psd_hint_ && c >= 0.0);
}

EigenDecomp eigh(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNoConvergence, "Hermitian eigensolver did not converge");
  }
  EigenDecomp out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  fix_phase(out.vectors);
  return out;
}

namespace {

// Returns eigen-decomposition after validating PSD-ness; negative roundoff
// eigenvalues are clamped to zero.
EigenDecomp checked_psd_eig(const HermitianMatrix& a) {
  EigenDecomp e = eigh(a);
  const double lmax = std::max(e.values(0), 0.0);
  const double tol = std::max(kPsdRelTol * lmax, kPsdAbsFloor);
  if (e.values(e.values.size() - 1) < -tol) {
    throw Error(ErrorCode::kNotPSD, "eigenvalue " + std::to_string(e.values.minCoeff()) +
                                        " below tolerance");
  }
  e.values = e.values.cwiseMax(0.0);
  return e;
}

}  // namespace

ComplexMatrix hermitian_sqrt(const HermitianMatrix& a) {
  const EigenDecomp e = checked_psd_eig(a);
  const ComplexMatrix s =
      e.vectors * e.values.cwiseSqrt().cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return symmetrize(s);
}

ComplexMatrix hermitian_inv_sqrt(const HermitianMatrix& a) {
  const EigenDecomp e = eigh(a);
  const double lmax = e.values(0);
  const double lmin = e.values(e.values.size() - 1);
  if (!(lmax > 0.0) || lmin <= kRcondFloor * lmax) {
    throw Error(ErrorCode::kNotPD, "inverse square root of a non-PD matrix");
  }
  const ComplexMatrix s = e.vectors * e.values.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                          e.vectors.adjoint();
  return symmetrize(s);
}

ComplexMatrix partial_cholesky(const HermitianMatrix& a, Eigen::Index rank) {
  const Eigen::Index n = a.dim();
  if (rank < 1 || rank > n) {
    throw Error(ErrorCode::kBadParam, "partial Cholesky rank must lie in [1, N]");
  }
  const double threshold = 1e-12 * a.matrix().diagonal().real().sum() / static_cast<double>(n);
  // Outer-product Cholesky stopped after `rank` steps; `work` holds the
  // running Schur complement in its trailing block.
  ComplexMatrix work = a.matrix();
  ComplexMatrix g = ComplexMatrix::Zero(n, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    const double pivot = work(k, k).real();
    if (!(pivot > threshold)) {
      throw Error(ErrorCode::kSingularPivot,
                  "pivot " + std::to_string(pivot) + " at step " + std::to_string(k));
    }
    const double d = std::sqrt(pivot);
    g(k, k) = d;
    const Eigen::Index tail = n - k - 1;
    if (tail > 0) {
      g.col(k).tail(tail) = work.col(k).tail(tail) / d;
      work.bottomRightCorner(tail, tail).noalias() -=
          g.col(k).tail(tail) * g.col(k).tail(tail).adjoint();
    }
  }
  return g;
}

ComplexMatrix orth_complement(const ComplexVector& v) {
  const Eigen::Index n = v.size();
  const double norm = v.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::kZeroVector, "orth_complement of a zero vector");
  if (n == 1) return ComplexMatrix(1, 0);
  const ComplexVector x = v / norm;
  // Reflector H = I - 2 u u^H / (u^H u) maps x onto alpha e_1; the sign of
  // alpha opposes x_1 to avoid cancellation.
  const double x0 = std::abs(x(0));
  const Complex phase = x0 > 0.0 ? x(0) / x0 : Complex(1.0, 0.0);
  const Complex alpha = -phase;
  ComplexVector u = x;
  u(0) -= alpha;
  const double unorm2 = u.squaredNorm();
  ComplexMatrix h = ComplexMatrix::Identity(n, n) - (2.0 / unorm2) * u * u.adjoint();
  return h.rightCols(n - 1);
}

HermitianMatrix projector(const ComplexMatrix& a) {
  if (a.cols() == 0) {
    return HermitianMatrix::from_product(ComplexMatrix::Zero(a.rows(), a.rows()));
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(s.size() - 1) <= 1e-10 * s(0)) {
    throw Error(ErrorCode::kRankDeficient, "projector requires full column rank");
  }
  const ComplexMatrix& u = svd.matrixU();
  return HermitianMatrix::from_product(u * u.adjoint());
}

ComplexVector project_out(const ComplexMatrix& a, const ComplexVector& v) {
  if (a.cols() == 0) return v;
  const HermitianMatrix gram = HermitianMatrix::from_product(a.adjoint() * a);
  const ComplexVector coeffs = solve_pd(gram, a.adjoint() * v);
  return v - a * coeffs;
}

ComplexMatrix solve_pd(const HermitianMatrix& a, const ComplexMatrix& b) {
  Eigen::LLT<ComplexMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success || !(llt.rcond() > kRcondFloor)) {
    throw Error(ErrorCode::kSingular, "matrix is singular or not positive definite");
  }
  return llt.solve(b);
}

double inv_quad(const HermitianMatrix& a, const ComplexVector& x) {
  const ComplexVector y = solve_pd(a, x);
  return x.dot(y).real();
}

ComplexMatrix inverse_pd(const HermitianMatrix& a) {
  return symmetrize(solve_pd(a, ComplexMatrix::Identity(a.dim(), a.dim())));
}

ComplexMatrix cholesky_lower(const HermitianMatrix& a, ErrorCode code) {
  Eigen::LLT<ComplexMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) throw Error(code, "matrix is not positive definite");
  const RealVector d = llt.matrixLLT().diagonal().real();
  if (!(d.minCoeff() > 1e-12 * std::max(1.0, d.maxCoeff()))) {
    throw Error(code, "matrix is numerically singular");
  }
  return llt.matrixL();
}

double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace snrloss
