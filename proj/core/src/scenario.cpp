#include "snrloss/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "snrloss/distributions.hpp"
#include "snrloss/loss_law.hpp"

namespace snrloss {

namespace {

constexpr std::pair<ScenarioKind, std::string_view> kKindNames[] = {
    {ScenarioKind::kMvdr, "mvdr"},
    {ScenarioKind::kHomog, "homog"},
    {ScenarioKind::kMpdr, "mpdr"},
    {ScenarioKind::kGer, "ger"},
    {ScenarioKind::kSurprise, "surprise"},
    {ScenarioKind::kWishartMismatch, "wishart_mismatch"},
    {ScenarioKind::kStudent, "student"},
};

void check_v(const HermitianMatrix& m, const ComplexVector& v) {
  if (m.dim() != v.size()) throw Error(ErrorCode::kBadParam, "dimension mismatch between matrix and v");
  if (!(v.norm() > 0.0)) throw Error(ErrorCode::kZeroVector, "steering vector is zero");
}

// C-oblique projection of a steering vector: q^H ct^-1 v = 0.
ComplexVector oblique_q(const HermitianMatrix& ct, const ComplexVector& v, double q_angle_deg) {
  const ComplexVector q0 = ula_steering(v.size(), q_angle_deg);
  const ComplexVector civ = solve_pd(ct, v);
  const Complex num = civ.dot(q0);  // v^H ct^-1 q0
  const Complex den = civ.dot(v);
  ComplexVector q = q0 - (num / den) * v;
  if (q.norm() < 1e-10) throw Error(ErrorCode::kDegenerateQ, "surprise direction collapses onto v");
  return q;
}

Scenario surprise_from_q(const HermitianMatrix& ct, const ComplexVector& v, const ComplexVector& q) {
  Scenario s;
  s.ct = ct;
  s.sigma = ct.plus_rank_one(q);
  s.v = v;
  s.kind = ScenarioKind::kSurprise;
  s.extras.q = q;
  s.extras.q_metric = inv_quad(ct, q);
  s.extras.lambda = 1.0;
  return s;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kBadParam, "unknown scenario kind '" + std::string(name) + "'");
}

ComplexVector ula_steering(Eigen::Index n, double angle_deg) {
  if (!(std::abs(angle_deg) < 90.0)) throw Error(ErrorCode::kBadAngle, "angle must lie in (-90, 90)");
  if (n < 1) throw Error(ErrorCode::kBadParam, "array size must be positive");
  const double s = std::sin(angle_deg * std::numbers::pi / 180.0);
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = std::polar(1.0, std::numbers::pi * static_cast<double>(i) * s);
  }
  return v;
}

SigmaBuild build_sigma(Eigen::Index n, const std::vector<Interferer>& interferers, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kBadParam, "gamma must be positive");
  SigmaBuild out;
  out.g = ComplexMatrix(n, static_cast<Eigen::Index>(interferers.size()));
  for (std::size_t r = 0; r < interferers.size(); ++r) {
    const double amp = std::pow(10.0, interferers[r].power_db / 20.0);
    out.g.col(static_cast<Eigen::Index>(r)) = amp * ula_steering(n, interferers[r].angle_deg);
  }
  ComplexMatrix m = out.g * out.g.adjoint();
  m.diagonal().array() += gamma;
  out.sigma = HermitianMatrix::from_product(m);
  return out;
}

std::vector<Interferer> reference_interferers() {
  return {{-12.0, 35.0}, {9.0, 25.0}, {25.0, 30.0}};
}

Scenario make_mvdr(const HermitianMatrix& sigma, const ComplexVector& v) {
  check_v(sigma, v);
  Scenario s;
  s.sigma = sigma;
  s.ct = sigma;
  s.v = v;
  s.kind = ScenarioKind::kMvdr;
  return s;
}

Scenario make_homog(const HermitianMatrix& sigma, const ComplexVector& v, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kBadParam, "gamma must be positive");
  Scenario s = make_mvdr(sigma, v);
  s.ct = sigma.scaled(gamma);
  s.gamma = gamma;
  s.kind = ScenarioKind::kHomog;
  return s;
}

Scenario make_mpdr(const HermitianMatrix& sigma, const ComplexVector& v, double power, double gamma) {
  if (!(power >= 0.0)) throw Error(ErrorCode::kBadParam, "SoI power must be nonnegative");
  Scenario s = make_homog(sigma, v, gamma);
  s.ct = sigma.scaled(gamma).plus_rank_one(v, power);
  s.soi_power = power;
  s.kind = ScenarioKind::kMpdr;
  return s;
}

Scenario make_surprise(const HermitianMatrix& ct, const ComplexVector& v, double q_angle_deg,
                       double q_power_db) {
  check_v(ct, v);
  ComplexVector q = oblique_q(ct, v, q_angle_deg);
  const double target = std::sqrt(static_cast<double>(v.size()) * std::pow(10.0, q_power_db / 10.0));
  q *= target / q.norm();
  return surprise_from_q(ct, v, q);
}

Scenario make_surprise_metric(const HermitianMatrix& ct, const ComplexVector& v, double q_angle_deg,
                              double q_metric) {
  check_v(ct, v);
  if (!(q_metric >= 0.0)) throw Error(ErrorCode::kBadParam, "q metric must be nonnegative");
  ComplexVector q = oblique_q(ct, v, q_angle_deg);
  const double m = inv_quad(ct, q);
  q *= std::sqrt(q_metric / m);
  return surprise_from_q(ct, v, q);
}

Scenario make_ger(const HermitianMatrix& sigma, const ComplexVector& v, Rng& rng, double strength) {
  check_v(sigma, v);
  const Eigen::Index n = v.size();
  Scenario s = make_mvdr(sigma, v);
  s.kind = ScenarioKind::kGer;
  if (n >= 3 && strength != 0.0) {
    ComplexVector u = solve_pd(sigma, v);
    u /= u.norm();
    ComplexMatrix b = rng.complex_normal_matrix(n, n - 2);
    b -= u * (u.adjoint() * b);
    b *= strength;
    s.ct = sigma.plus(HermitianMatrix::from_product(b * b.adjoint()));
  }
  const GeneralRepParams p = derive_general_params(s.sigma, s.ct, v);
  s.extras.lambda = 1.0 / p.ratio;
  s.extras.omega_eigs.assign(p.omega_eigs.data(), p.omega_eigs.data() + p.omega_eigs.size());
  return s;
}

Scenario make_wishart_mismatch(const HermitianMatrix& sigma, const ComplexVector& v, Rng& rng,
                               double eta_db_lo, double eta_db_hi, double dof) {
  check_v(sigma, v);
  const Eigen::Index n = v.size();
  if (dof <= 0.0) dof = 2.0 * static_cast<double>(n);
  if (dof < static_cast<double>(n)) throw Error(ErrorCode::kInsufficientDoF, "dof must be >= N");
  if (eta_db_hi < eta_db_lo) throw Error(ErrorCode::kBadParam, "empty eta range");
  const double eta_db = eta_db_lo + (eta_db_hi - eta_db_lo) * rng.uniform();
  const double eta = std::pow(10.0, eta_db / 10.0);
  const HermitianMatrix w = sample_wishart_bartlett(rng, n, dof).scaled(eta / dof);
  const ComplexMatrix root = hermitian_sqrt(sigma);
  Scenario s = make_mvdr(sigma, v);
  s.kind = ScenarioKind::kWishartMismatch;
  s.ct = HermitianMatrix::from_product(root * solve_pd(w, root));
  s.extras.eta = eta;
  s.extras.dof = dof;
  return s;
}

Scenario make_student(const HermitianMatrix& sigma, const ComplexVector& v, double nu,
                      std::optional<double> mu_scale) {
  check_v(sigma, v);
  const double n = static_cast<double>(v.size());
  if (!(nu > n)) throw Error(ErrorCode::kBadParam, "Student training data needs nu > N");
  const double mu = mu_scale.value_or(nu - n);
  if (!(mu > 0.0)) throw Error(ErrorCode::kBadParam, "Student scale must be positive");
  Scenario s = make_mvdr(sigma, v);
  s.kind = ScenarioKind::kStudent;
  s.extras.nu = nu;
  s.extras.mu = mu;
  return s;
}

TrainingSampler::TrainingSampler(const Scenario& scenario) : kind_(scenario.kind) {
  if (kind_ == ScenarioKind::kStudent) {
    root_ = hermitian_sqrt(scenario.sigma.scaled(scenario.extras.mu));
    nu_ = scenario.extras.nu;
  } else {
    root_ = cholesky_lower(scenario.ct, ErrorCode::kNotPD);
  }
}

ComplexMatrix TrainingSampler::draw(Rng& rng, Eigen::Index k) const {
  if (k < 1) throw Error(ErrorCode::kBadParam, "K must be at least 1");
  const Eigen::Index n = root_.rows();
  if (kind_ == ScenarioKind::kStudent) {
    // (mu Sigma)^(1/2) W^(-1/2) N with W ~ CW(N, nu, I)
    const HermitianMatrix w = sample_wishart_bartlett(rng, n, nu_);
    const ComplexMatrix z = rng.complex_normal_matrix(n, k);
    return root_ * (hermitian_inv_sqrt(w) * z);
  }
  return root_ * rng.complex_normal_matrix(n, k);
}

HermitianMatrix TrainingSampler::draw_covariance(Rng& rng, Eigen::Index k) const {
  const ComplexMatrix x = draw(rng, k);
  return HermitianMatrix::from_product(x * x.adjoint());
}

ComplexMatrix draw_training_set(Rng& rng, const Scenario& scenario, Eigen::Index k) {
  return TrainingSampler(scenario).draw(rng, k);
}

}  // namespace snrloss
