#pragma once

#include <string_view>
#include <vector>

#include "snrloss/filters.hpp"
#include "snrloss/hermitian.hpp"
#include "snrloss/rng.hpp"
#include "snrloss/scenario.hpp"
#include "snrloss/special.hpp"

namespace snrloss {

/// P |w^H v|^2 / (w^H Sigma w)
double snr(const Weight& w, const ComplexVector& v, const HermitianMatrix& sigma, double power);
/// P v^H Sigma^-1 v
double snr_opt(const HermitianMatrix& sigma, const ComplexVector& v, double power);
/// SNR(w) / SNR_opt, in [0, 1].
double snr_loss(const Weight& w, const ComplexVector& v, const HermitianMatrix& sigma);

struct GeneralRepParams {
  double ratio = 1.0;     ///< v^H Sigma^-1 v / v^H ct^-1 v
  RealVector omega_eigs;  ///< eigenvalues of Omega_22, descending
  RealVector deltas;      ///< noncentralities |u_i^H Omega_22^-1 Omega_21|^2
};

/// Builds Omega = Q^H ct^(-1/2) Sigma ct^(-1/2) Q with Q^H ct^(-1/2) v along e_1.
GeneralRepParams derive_general_params(const HermitianMatrix& sigma, const HermitianMatrix& ct,
                                       const ComplexVector& v);

enum class LawKind {
  kMvdr,
  kMpdr,
  kGer,
  kUndernulled,
  kGeneral,
  kStudent,
  kPaMvdr,
  kPaMpdr,
  kEcApprox,
  kPcholApprox,
  kDlApprox,
};

std::string_view to_string(LawKind kind) noexcept;
LawKind law_kind_from_string(std::string_view name);

/// Distribution of the SNR loss. Use the factories; they fill only the fields
/// the kind needs.
struct LossLaw {
  LawKind kind = LawKind::kMvdr;
  int n = 0;
  int k = 0;
  int r = 0;
  double snr_opt_over_gamma = 0.0;
  double lambda = 1.0;  ///< ger: ct^-1 v = lambda Sigma^-1 v; general: 1 / ratio
  std::vector<double> omega_eigs;
  std::vector<double> deltas;
  double nu = 0.0;
  double a = 1.0;
  double a_prime = 1.0;
  double q_metric = 0.0;

  static LossLaw mvdr(int n, int k);
  static LossLaw mpdr(int n, int k, double snr_opt_over_gamma);
  static LossLaw ger(int n, int k, double lambda, std::vector<double> omega_eigs);
  static LossLaw undernulled(int n, int k, double q_metric);
  static LossLaw general(int n, int k, const GeneralRepParams& params);
  static LossLaw student(int n, int k, double nu);
  static LossLaw pa_mvdr(int k, int r, double a);
  static LossLaw pa_mpdr(int k, int r, double a, double snr_opt_over_gamma);
  static LossLaw ec_approx(int k, int r);
  static LossLaw pchol_approx(int k, int r, double a_prime);
  static LossLaw dl_approx(int k, int r);

  bool approximate() const noexcept;
  /// Upper end of the support (a, a' or 1).
  double support_max() const noexcept;
  bool has_closed_form() const noexcept;
  /// Beta law of the unscaled ratio for the Beta-type kinds.
  BetaParams beta() const;
  /// Throws kBadParam when the kind's fields are inconsistent.
  void validate() const;
};

double sample_rho(Rng& rng, const LossLaw& law);

/// Throws kNoClosedForm for ger, general and undernulled.
double pdf_rho(double rho, const LossLaw& law);
/// Exact for the Beta-type kinds and their MPDR maps, quadrature for student,
/// empirical (10^6 seeded draws, cached) for the representation-only kinds.
double cdf_rho(double rho, const LossLaw& law);
/// True when cdf_rho falls back to the empirical cache.
bool cdf_is_empirical(const LossLaw& law) noexcept;

/// v^H T (T^H Sigma T)^-1 T^H v / v^H Sigma^-1 v
double coef_a(const Transform& t, const HermitianMatrix& sigma, const ComplexVector& v);

/// rho / (1 + (1 - rho) snr_opt)
double mpdr_map(double rho_mvdr, double snr_opt);

/// Exact law of the SMI loss under a scenario.
LossLaw law_for_scenario(const Scenario& scenario, int k);

}  // namespace snrloss
