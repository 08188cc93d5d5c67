#pragma once

#include "snrloss/rng.hpp"

namespace snrloss {

/// Beta law with density x^(alpha-1) (1-x)^(beta-1) / B(alpha, beta).
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  /// Converts the reversed two-index notation Beta{k1}{k2}, whose density is
  /// proportional to x^(k2-1) (1-x)^(k1-1). This is the only conversion point
  /// between the two orders.
  static BetaParams from_reversed(double k1, double k2) { return {k2, k1}; }

  double mean() const { return alpha / (alpha + beta); }
  double variance() const {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
};

double beta_pdf(double x, const BetaParams& p);
/// Regularized incomplete beta I_x(alpha, beta).
double beta_cdf(double x, const BetaParams& p);
/// Gamma-ratio construction G_a / (G_a + G_b).
double beta_sample(Rng& rng, const BetaParams& p);

/// Gauss hypergeometric 2F1(a, b; c; z) for 0 <= z < 1 by direct series, with
/// the Euler transformation (1-z)^(c-a-b) 2F1(c-a, c-b; c; z) when z > 0.5 and
/// the transformed terms decay faster (a + b > c). Close to z = 1, when
/// (1-z) max(|a|,1) max(|b|,1) <= 1 and |c-a-b| <= 20, the 1-z connection
/// formulas take over (logarithmic form for integer c-a-b). Relative tolerance 1e-12;
/// throws kNoConvergence after 10^6 terms.
double gauss_2f1(double a, double b, double c, double z);

/// Raw series without transformation, summed until the tail bound meets
/// `rel_tol`. Exposed for cross-checking.
double gauss_2f1_series(double a, double b, double c, double z, double rel_tol = 1e-12);

/// B(a, x + d) / B(a, x) computed without cancellation for large x.
double beta_shift_ratio(double a, double x, double d);

}  // namespace snrloss
