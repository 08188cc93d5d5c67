#include "snrloss/loss_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "snrloss/distributions.hpp"

namespace snrloss {

namespace {

constexpr std::pair<LawKind, std::string_view> kLawNames[] = {
    {LawKind::kMvdr, "mvdr"},
    {LawKind::kMpdr, "mpdr"},
    {LawKind::kGer, "ger"},
    {LawKind::kUndernulled, "undernulled"},
    {LawKind::kGeneral, "general"},
    {LawKind::kStudent, "student"},
    {LawKind::kPaMvdr, "pa_mvdr"},
    {LawKind::kPaMpdr, "pa_mpdr"},
    {LawKind::kEcApprox, "ec_approx"},
    {LawKind::kPcholApprox, "pchol_approx"},
    {LawKind::kDlApprox, "dl_approx"},
};

constexpr std::size_t kEmpiricalDraws = 1'000'000;
constexpr std::uint64_t kEmpiricalSeed = 0x5eed'c0de'2024ULL;

double chi(Rng& rng, double k) { return sample_cchisq(rng, k); }

bool is_pa_family(LawKind k) {
  return k == LawKind::kPaMvdr || k == LawKind::kPaMpdr || k == LawKind::kEcApprox ||
         k == LawKind::kPcholApprox || k == LawKind::kDlApprox;
}

double scale_of(const LossLaw& law) {
  switch (law.kind) {
    case LawKind::kPaMvdr:
    case LawKind::kPaMpdr: return law.a;
    case LawKind::kPcholApprox: return law.a_prime;
    default: return 1.0;
  }
}

// MPDR-type map from the loss to the underlying Beta variable:
// r = t (1 + s) / (1 + t s) with t the loss over its scale.
double mpdr_inverse(double t, double s) { return t * (1.0 + s) / (1.0 + t * s); }

double student_pdf(double rho, const LossLaw& law) {
  const BetaParams b = law.beta();
  const double base = beta_pdf(rho, b);
  if (base == 0.0) return 0.0;
  const double kn1 = static_cast<double>(law.k - law.n + 1);
  const double ratio = beta_shift_ratio(kn1, law.nu, static_cast<double>(law.n - 1));
  const double f = gauss_2f1(static_cast<double>(law.k + 1), kn1, law.nu + law.k, 1.0 - rho);
  return base * ratio * f;
}

std::string law_key(const LossLaw& law) {
  std::string key(to_string(law.kind));
  char buf[64];
  auto add = [&](double x) {
    std::snprintf(buf, sizeof buf, "|%.17g", x);
    key += buf;
  };
  add(law.n);
  add(law.k);
  add(law.lambda);
  add(law.q_metric);
  for (double x : law.omega_eigs) add(x);
  key += "/";
  for (double x : law.deltas) add(x);
  return key;
}

std::shared_ptr<const std::vector<double>> empirical_samples(const LossLaw& law) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const std::vector<double>>> cache;
  const std::string key = law_key(law);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto samples = std::make_shared<std::vector<double>>(kEmpiricalDraws);
  Rng rng(kEmpiricalSeed);
  for (double& x : *samples) x = sample_rho(rng, law);
  std::sort(samples->begin(), samples->end());
  cache.emplace(key, samples);
  return samples;
}

}  // namespace

std::string_view to_string(LawKind kind) noexcept {
  for (const auto& [k, name] : kLawNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

LawKind law_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kLawNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kBadParam, "unknown law kind '" + std::string(name) + "'");
}

double snr(const Weight& w, const ComplexVector& v, const HermitianMatrix& sigma, double power) {
  if (!(w.norm() > 0.0)) throw Error(ErrorCode::kZeroVector, "filter is zero");
  const double num = std::norm(w.dot(v));
  const double den = w.dot(sigma.matrix() * w).real();
  return power * num / den;
}

double snr_opt(const HermitianMatrix& sigma, const ComplexVector& v, double power) {
  return power * inv_quad(sigma, v);
}

double snr_loss(const Weight& w, const ComplexVector& v, const HermitianMatrix& sigma) {
  const double rho = snr(w, v, sigma, 1.0) / snr_opt(sigma, v, 1.0);
  return std::clamp(rho, 0.0, 1.0);
}

GeneralRepParams derive_general_params(const HermitianMatrix& sigma, const HermitianMatrix& ct,
                                       const ComplexVector& v) {
  const Eigen::Index n = v.size();
  const ComplexMatrix ci = hermitian_inv_sqrt(ct);
  ComplexVector u = ci * v;
  u /= u.norm();
  ComplexMatrix q(n, n);
  q.col(0) = u;
  q.rightCols(n - 1) = orth_complement(u);
  const ComplexMatrix omega = q.adjoint() * ci * sigma.matrix() * ci * q;

  GeneralRepParams out;
  out.ratio = inv_quad(sigma, v) / inv_quad(ct, v);
  if (n == 1) return out;
  const HermitianMatrix o22 = HermitianMatrix::from_product(omega.bottomRightCorner(n - 1, n - 1));
  const ComplexVector o21 = omega.bottomLeftCorner(n - 1, 1);
  const EigenDecomp e = eigh(o22);
  const ComplexVector tbar = solve_pd(o22, o21);
  out.omega_eigs = e.values;
  out.deltas = (e.vectors.adjoint() * tbar).cwiseAbs2();
  return out;
}

LossLaw LossLaw::mvdr(int n, int k) {
  LossLaw l;
  l.kind = LawKind::kMvdr;
  l.n = n;
  l.k = k;
  l.validate();
  return l;
}

LossLaw LossLaw::mpdr(int n, int k, double s) {
  LossLaw l = mvdr(n, k);
  l.kind = LawKind::kMpdr;
  l.snr_opt_over_gamma = s;
  l.validate();
  return l;
}

LossLaw LossLaw::ger(int n, int k, double lambda, std::vector<double> omega_eigs) {
  LossLaw l = mvdr(n, k);
  l.kind = LawKind::kGer;
  l.lambda = lambda;
  l.omega_eigs = std::move(omega_eigs);
  l.validate();
  return l;
}

LossLaw LossLaw::undernulled(int n, int k, double q_metric) {
  LossLaw l = mvdr(n, k);
  l.kind = LawKind::kUndernulled;
  l.q_metric = q_metric;
  l.validate();
  return l;
}

LossLaw LossLaw::general(int n, int k, const GeneralRepParams& p) {
  LossLaw l = mvdr(n, k);
  l.kind = LawKind::kGeneral;
  l.lambda = 1.0 / p.ratio;
  l.omega_eigs.assign(p.omega_eigs.data(), p.omega_eigs.data() + p.omega_eigs.size());
  l.deltas.assign(p.deltas.data(), p.deltas.data() + p.deltas.size());
  l.validate();
  return l;
}

LossLaw LossLaw::student(int n, int k, double nu) {
  LossLaw l = mvdr(n, k);
  l.kind = LawKind::kStudent;
  l.nu = nu;
  l.validate();
  return l;
}

LossLaw LossLaw::pa_mvdr(int k, int r, double a) {
  LossLaw l;
  l.kind = LawKind::kPaMvdr;
  l.k = k;
  l.r = r;
  l.a = a;
  l.validate();
  return l;
}

LossLaw LossLaw::pa_mpdr(int k, int r, double a, double s) {
  LossLaw l = pa_mvdr(k, r, a);
  l.kind = LawKind::kPaMpdr;
  l.snr_opt_over_gamma = s;
  l.validate();
  return l;
}

LossLaw LossLaw::ec_approx(int k, int r) {
  LossLaw l;
  l.kind = LawKind::kEcApprox;
  l.k = k;
  l.r = r;
  l.validate();
  return l;
}

LossLaw LossLaw::pchol_approx(int k, int r, double a_prime) {
  LossLaw l = ec_approx(k, r);
  l.kind = LawKind::kPcholApprox;
  l.a_prime = a_prime;
  l.validate();
  return l;
}

LossLaw LossLaw::dl_approx(int k, int r) {
  LossLaw l = ec_approx(k, r);
  l.kind = LawKind::kDlApprox;
  return l;
}

bool LossLaw::approximate() const noexcept {
  return kind == LawKind::kEcApprox || kind == LawKind::kPcholApprox || kind == LawKind::kDlApprox;
}

double LossLaw::support_max() const noexcept { return scale_of(*this); }

bool LossLaw::has_closed_form() const noexcept {
  return kind != LawKind::kGer && kind != LawKind::kGeneral && kind != LawKind::kUndernulled;
}

BetaParams LossLaw::beta() const {
  if (is_pa_family(kind)) return BetaParams::from_reversed(r, k - r + 1);
  return BetaParams::from_reversed(n - 1, k - n + 2);
}

void LossLaw::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::kBadParam, what); };
  if (is_pa_family(kind)) {
    if (r < 1 || k < r) bad("law needs 1 <= R <= K");
    if (!(a > 0.0 && a <= 1.0 + 1e-9)) bad("scale a must lie in (0, 1]");
    if (!(a_prime > 0.0 && a_prime <= 1.0 + 1e-9)) bad("scale a' must lie in (0, 1]");
  } else {
    if (n < 2 || k < n) bad("law needs N >= 2 and K >= N");
  }
  if (!(snr_opt_over_gamma >= 0.0)) bad("SNR_opt / gamma must be nonnegative");
  if (kind == LawKind::kStudent && !(nu > 0.0)) bad("nu must be positive");
  if (kind == LawKind::kUndernulled && !(q_metric >= 0.0)) bad("q metric must be nonnegative");
  if (kind == LawKind::kGer || kind == LawKind::kGeneral) {
    if (!(lambda > 0.0)) bad("lambda must be positive");
    if (omega_eigs.size() != static_cast<std::size_t>(n - 1)) bad("need N-1 Omega eigenvalues");
    for (double x : omega_eigs) {
      if (!(x > 0.0)) bad("Omega eigenvalues must be positive");
    }
  }
  if (kind == LawKind::kGeneral) {
    if (deltas.size() != omega_eigs.size()) bad("need one delta per eigenvalue");
    for (double d : deltas) {
      if (!(d >= 0.0)) bad("deltas must be nonnegative");
    }
  }
}

double sample_rho(Rng& rng, const LossLaw& law) {
  const double n = law.n;
  const double k = law.k;
  const double r = law.r;
  switch (law.kind) {
    case LawKind::kMvdr: return 1.0 / (1.0 + chi(rng, n - 1) / chi(rng, k - n + 2));
    case LawKind::kMpdr: {
      const double x = chi(rng, n - 1) / chi(rng, k - n + 2);
      return 1.0 / (1.0 + (1.0 + law.snr_opt_over_gamma) * x);
    }
    case LawKind::kGer: {
      double sum = 0.0;
      for (double li : law.omega_eigs) sum += li * chi(rng, 1.0);
      return 1.0 / (1.0 + sum / (law.lambda * chi(rng, k - n + 2)));
    }
    case LawKind::kUndernulled: {
      double num = (1.0 + law.q_metric) * chi(rng, 1.0);
      if (law.n > 2) num += chi(rng, n - 2);
      return 1.0 / (1.0 + num / chi(rng, k - n + 2));
    }
    case LawKind::kGeneral: {
      const double v21 = chi(rng, k - n + 2);
      double sum = 0.0;
      for (std::size_t i = 0; i < law.omega_eigs.size(); ++i) {
        sum += law.omega_eigs[i] * sample_cchisq(rng, 1.0, v21 * law.deltas[i]);
      }
      return 1.0 / (1.0 + sum / (law.lambda * v21));
    }
    case LawKind::kStudent: {
      const double f = 1.0 + chi(rng, k - n + 1) / chi(rng, law.nu);
      const double x = chi(rng, n - 1) / chi(rng, k - n + 2);
      return 1.0 / (1.0 + f * x);
    }
    case LawKind::kPaMvdr:
    case LawKind::kEcApprox:
    case LawKind::kPcholApprox:
    case LawKind::kDlApprox:
      return scale_of(law) / (1.0 + chi(rng, r) / chi(rng, k - r + 1));
    case LawKind::kPaMpdr: {
      const double x = chi(rng, r) / chi(rng, k - r + 1);
      return law.a / (1.0 + (1.0 + law.a * law.snr_opt_over_gamma) * x);
    }
  }
  throw Error(ErrorCode::kBadParam, "unknown law kind");
}

double pdf_rho(double rho, const LossLaw& law) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::kBadParam, "rho outside [0, 1]");
  if (!law.has_closed_form()) {
    throw Error(ErrorCode::kNoClosedForm, std::string(to_string(law.kind)) + " law has no density");
  }
  const double scale = scale_of(law);
  if (rho > scale) return 0.0;
  const double t = rho / scale;
  const BetaParams b = law.beta();
  switch (law.kind) {
    case LawKind::kStudent: return student_pdf(rho, law);
    case LawKind::kMpdr:
    case LawKind::kPaMpdr: {
      // Fully adaptive case is a = 1 with exponent K - N + 2 = alpha.
      const double s = law.snr_opt_over_gamma;
      const double as = scale * s;
      const double logf = b.alpha * std::log1p(as) - (law.k + 1.0) * std::log1p(rho * s);
      return beta_pdf(t, b) / scale * std::exp(logf);
    }
    default: return beta_pdf(t, b) / scale;
  }
}

double cdf_rho(double rho, const LossLaw& law) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::kBadParam, "rho outside [0, 1]");
  if (cdf_is_empirical(law)) {
    const auto samples = empirical_samples(law);
    const auto it = std::upper_bound(samples->begin(), samples->end(), rho);
    return static_cast<double>(it - samples->begin()) / static_cast<double>(samples->size());
  }
  const double scale = scale_of(law);
  if (rho >= scale) return 1.0;
  const double t = rho / scale;
  const BetaParams b = law.beta();
  switch (law.kind) {
    case LawKind::kMpdr:
    case LawKind::kPaMpdr:
      return beta_cdf(mpdr_inverse(t, scale * law.snr_opt_over_gamma), b);
    case LawKind::kStudent: {
      if (rho == 0.0) return 0.0;
      auto f = [&law](double x) { return student_pdf(x, law); };
      double err = 0.0;
      const double c = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, rho, 15,
                                                                                     1e-10, &err);
      return std::clamp(c, 0.0, 1.0);
    }
    default: return beta_cdf(t, b);
  }
}

bool cdf_is_empirical(const LossLaw& law) noexcept { return !law.has_closed_form(); }

double coef_a(const Transform& t, const HermitianMatrix& sigma, const ComplexVector& v) {
  const ComplexMatrix& m = t.matrix;
  const HermitianMatrix reduced = HermitianMatrix::from_product(m.adjoint() * sigma.matrix() * m);
  const ComplexVector tv = m.adjoint() * v;
  const double num = inv_quad(reduced, tv);
  return num / inv_quad(sigma, v);
}

double mpdr_map(double rho_mvdr, double snr_opt) {
  return rho_mvdr / (1.0 + (1.0 - rho_mvdr) * snr_opt);
}

LossLaw law_for_scenario(const Scenario& s, int k) {
  const int n = static_cast<int>(s.dim());
  switch (s.kind) {
    case ScenarioKind::kMvdr:
    case ScenarioKind::kHomog: return LossLaw::mvdr(n, k);
    case ScenarioKind::kMpdr:
      return LossLaw::mpdr(n, k, snr_opt(s.sigma, s.v, s.soi_power) / s.gamma);
    case ScenarioKind::kSurprise: return LossLaw::undernulled(n, k, s.extras.q_metric);
    case ScenarioKind::kGer: {
      const GeneralRepParams p = derive_general_params(s.sigma, s.ct, s.v);
      return LossLaw::ger(n, k, 1.0 / p.ratio,
                          std::vector<double>(p.omega_eigs.data(), p.omega_eigs.data() + p.omega_eigs.size()));
    }
    case ScenarioKind::kWishartMismatch:
      return LossLaw::general(n, k, derive_general_params(s.sigma, s.ct, s.v));
    case ScenarioKind::kStudent: return LossLaw::student(n, k, s.extras.nu);
  }
  throw Error(ErrorCode::kBadParam, "unknown scenario kind");
}

}  // namespace snrloss
