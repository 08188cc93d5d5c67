#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "snrloss/hermitian.hpp"
#include "snrloss/rng.hpp"

namespace snrloss {

struct Interferer {
  double angle_deg = 0.0;  ///< from broadside
  double power_db = 0.0;   ///< per element, above unit white noise
};

enum class ScenarioKind { kMvdr, kHomog, kMpdr, kGer, kSurprise, kWishartMismatch, kStudent };

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind scenario_kind_from_string(std::string_view name);

/// Kind-specific parameters. Only the fields relevant to the kind are meaningful.
struct ScenarioExtras {
  double lambda = 1.0;             ///< ger / surprise: ct^-1 v = lambda sigma^-1 v
  ComplexVector q;                 ///< surprise: rank-one component
  double q_metric = 0.0;           ///< surprise: q^H ct^-1 q
  std::vector<double> omega_eigs;  ///< ger: eigenvalues of Omega_22
  double eta = 1.0;                ///< wishart_mismatch: mean scale of W
  double dof = 0.0;                ///< wishart_mismatch: degrees of freedom of W
  double nu = 0.0;                 ///< student
  double mu = 0.0;                 ///< student
};

struct Scenario {
  HermitianMatrix sigma;
  HermitianMatrix ct;
  ComplexVector v;
  double soi_power = 0.0;
  double gamma = 1.0;
  ScenarioKind kind = ScenarioKind::kMvdr;
  ScenarioExtras extras;

  Eigen::Index dim() const { return v.size(); }
};

/// v_n = exp(j pi n sin(theta)), n = 0..N-1. Throws kBadAngle unless |theta| < 90.
ComplexVector ula_steering(Eigen::Index n, double angle_deg);

struct SigmaBuild {
  HermitianMatrix sigma;
  ComplexMatrix g;  ///< N x (#interferers), column r = 10^(dB/20) steering
};

SigmaBuild build_sigma(Eigen::Index n, const std::vector<Interferer>& interferers, double gamma = 1.0);

/// Three interferers at -12, 9 and 25 degrees with 35, 25 and 30 dB.
std::vector<Interferer> reference_interferers();

Scenario make_mvdr(const HermitianMatrix& sigma, const ComplexVector& v);
Scenario make_homog(const HermitianMatrix& sigma, const ComplexVector& v, double gamma);
/// ct = gamma sigma + P v v^H.
Scenario make_mpdr(const HermitianMatrix& sigma, const ComplexVector& v, double power, double gamma = 1.0);

/// sigma = ct + q q^H with q^H ct^-1 v = 0; q starts as a steering vector at
/// q_angle and ends with per-element power 10^(q_power_db/10).
Scenario make_surprise(const HermitianMatrix& ct, const ComplexVector& v, double q_angle_deg,
                       double q_power_db);
/// Same construction, scaled so that q^H ct^-1 q equals `q_metric`.
Scenario make_surprise_metric(const HermitianMatrix& ct, const ComplexVector& v, double q_angle_deg,
                              double q_metric);

/// ct = sigma + B B^H, B random N x (N-2) with B^H sigma^-1 v = 0, scaled by strength.
Scenario make_ger(const HermitianMatrix& sigma, const ComplexVector& v, Rng& rng, double strength = 1.0);

/// ct = sigma^(1/2) W^-1 sigma^(1/2), W ~ CW(N, dof, (eta/dof) I), 10 log10(eta)
/// uniform on [eta_db_lo, eta_db_hi]. dof defaults to 2N when <= 0.
Scenario make_wishart_mismatch(const HermitianMatrix& sigma, const ComplexVector& v, Rng& rng,
                               double eta_db_lo = -6.0, double eta_db_hi = 6.0, double dof = 0.0);

/// Student training data with nu > N; mu defaults to nu - N.
Scenario make_student(const HermitianMatrix& sigma, const ComplexVector& v, double nu,
                      std::optional<double> mu_scale = std::nullopt);

/// N x K training matrix for the scenario.
ComplexMatrix draw_training_set(Rng& rng, const Scenario& scenario, Eigen::Index k);

/// Caches the square roots used by draw_training_set. Immutable after
/// construction; share freely across threads.
class TrainingSampler {
 public:
  explicit TrainingSampler(const Scenario& scenario);
  ComplexMatrix draw(Rng& rng, Eigen::Index k) const;
  /// S_t = X X^H.
  HermitianMatrix draw_covariance(Rng& rng, Eigen::Index k) const;

 private:
  ScenarioKind kind_;
  ComplexMatrix root_;
  double nu_ = 0.0;
};

}  // namespace snrloss
