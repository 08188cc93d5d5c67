#include "snrloss/special.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace snrloss {

namespace {

constexpr long kMaxTerms = 1'000'000;
// Above this |c-a-b| the plain terms fall off fast enough even as z -> 1.
constexpr double kConnectionMaxGap = 20.0;

void check_beta(const BetaParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    throw Error(ErrorCode::kBadParam, "Beta parameters must be finite and positive");
  }
}

void check_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::kBadParam, "argument outside [0, 1]");
}

}  // namespace

double beta_pdf(double x, const BetaParams& p) {
  check_beta(p);
  check_unit(x);
  if ((x == 0.0 && p.alpha < 1.0) || (x == 1.0 && p.beta < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  if ((x == 0.0 && p.alpha > 1.0) || (x == 1.0 && p.beta > 1.0)) return 0.0;
  return boost::math::ibeta_derivative(p.alpha, p.beta, x);
}

double beta_cdf(double x, const BetaParams& p) {
  check_beta(p);
  check_unit(x);
  return boost::math::ibeta(p.alpha, p.beta, x);
}

double beta_sample(Rng& rng, const BetaParams& p) {
  check_beta(p);
  const double ga = rng.gamma(p.alpha);
  const double gb = rng.gamma(p.beta);
  return ga / (ga + gb);
}

namespace {

bool nonpositive_int(double x) { return x <= 0.0 && x == std::floor(x); }

// log|Gamma(x)| with its sign; sign 0 marks a pole (1/Gamma vanishes).
struct LogGamma {
  double log;
  int sign;
};

LogGamma log_gamma(double x) {
  if (nonpositive_int(x)) return {0.0, 0};
  int sign = 1;
  const double l = boost::math::lgamma(x, &sign);
  return {l, sign};
}

// c must not be a nonpositive integer.
double series(double a, double b, double c, double z, double rel_tol) {
  double sum = 1.0;
  double term = 1.0;
  for (long n = 0; n < kMaxTerms; ++n) {
    const double dn = static_cast<double>(n);
    const double ratio = (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;
    // Later ratios are bounded by max(ratio, z) once below 1, giving a
    // geometric bound on the remaining tail.
    const double m = std::max(std::abs(ratio), z);
    if (m < 1.0 && c + dn > 0.0) {
      const double tail = std::abs(term) * m / (1.0 - m);
      if (tail <= rel_tol * std::abs(sum)) return sum;
    }
  }
  throw Error(ErrorCode::kNoConvergence, "2F1 series exceeded 10^6 terms");
}

// c = a + b + m with integer m >= 0, w = 1 - z small: logarithmic connection formula.
double near_one_integer(double a, double b, int m, double w) {
  const double c = a + b + m;
  double part1 = 0.0;
  if (m > 0) {
    const LogGamma gm = log_gamma(m), gc = log_gamma(c), ga = log_gamma(a + m), gb = log_gamma(b + m);
    if (ga.sign != 0 && gb.sign != 0) {
      double u = 1.0;
      double sum = 1.0;
      for (int n = 0; n + 1 < m; ++n) {
        u *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * w;
        sum += u;
      }
      part1 = gm.sign * gc.sign * ga.sign * gb.sign * std::exp(gm.log + gc.log - ga.log - gb.log) * sum;
    }
  }
  const LogGamma ga = log_gamma(a), gb = log_gamma(b), gc = log_gamma(c);
  const double lw = std::log(w);
  const double pref = (m % 2 == 0 ? -1.0 : 1.0) * gc.sign * ga.sign * gb.sign *
                      std::exp(m * lw + gc.log - ga.log - gb.log - std::lgamma(m + 1.0));
  double psi_n = boost::math::digamma(1.0);
  double psi_nm = boost::math::digamma(m + 1.0);
  double psi_a = boost::math::digamma(a + m);
  double psi_b = boost::math::digamma(b + m);
  double v = 1.0;
  double sum = 0.0;
  for (long n = 0; n < kMaxTerms; ++n) {
    const double dn = static_cast<double>(n);
    const double bracket = lw - psi_n - psi_nm + psi_a + psi_b;
    sum += v * bracket;
    const double ratio = (a + m + dn) * (b + m + dn) / ((dn + 1.0) * (dn + m + 1.0)) * w;
    psi_n += 1.0 / (dn + 1.0);
    psi_nm += 1.0 / (dn + m + 1.0);
    psi_a += 1.0 / (a + m + dn);
    psi_b += 1.0 / (b + m + dn);
    v *= ratio;
    if (v == 0.0) break;
    const double r = std::max(std::abs(ratio), w);
    if (r < 1.0 && std::abs(v) * (std::abs(bracket) + 1.0) / (1.0 - r) <= 1e-15 * std::abs(sum)) break;
    if (n + 1 == kMaxTerms) throw Error(ErrorCode::kNoConvergence, "2F1 series exceeded 10^6 terms");
  }
  return part1 + pref * sum;
}

// Connection formula in w = 1 - z for c - a - b >= 0.
double near_one(double a, double b, double c, double z) {
  if (nonpositive_int(a) || nonpositive_int(b)) return series(a, b, c, z, 1e-12);
  const double s = c - a - b;
  const double w = 1.0 - z;
  const double m = std::round(s);
  if (std::abs(s - m) < 1e-9) return near_one_integer(a, b, static_cast<int>(m), w);
  const LogGamma gc = log_gamma(c), gs = log_gamma(s), gca = log_gamma(c - a), gcb = log_gamma(c - b);
  const LogGamma gns = log_gamma(-s), ga = log_gamma(a), gb = log_gamma(b);
  const double first = gc.sign * gs.sign * gca.sign * gcb.sign * std::exp(gc.log + gs.log - gca.log - gcb.log) *
                       series(a, b, 1.0 - s, w, 1e-15);
  const double second = gc.sign * gns.sign * ga.sign * gb.sign *
                        std::exp(s * std::log(w) + gc.log + gns.log - ga.log - gb.log) *
                        series(c - a, c - b, s + 1.0, w, 1e-15);
  return first + second;
}

}  // namespace

double gauss_2f1_series(double a, double b, double c, double z, double rel_tol) {
  if (!(c > 0.0)) throw Error(ErrorCode::kBadParam, "2F1 requires c > 0");
  if (!(z >= 0.0 && z < 1.0)) throw Error(ErrorCode::kBadParam, "2F1 requires 0 <= z < 1");
  if (z == 0.0) return 1.0;
  return series(a, b, c, z, rel_tol);
}

double gauss_2f1(double a, double b, double c, double z) {
  if (!(c > 0.0)) throw Error(ErrorCode::kBadParam, "2F1 requires c > 0");
  if (!(z >= 0.0 && z < 1.0)) throw Error(ErrorCode::kBadParam, "2F1 requires 0 <= z < 1");
  if (z == 0.0) return 1.0;
  const double gap = c - a - b;
  // The 1-z expansions cancel badly unless (1-z) a b is small; the plain
  // series covers the rest of the range in a modest number of terms.
  const double spread = (1.0 - z) * std::max(std::abs(a), 1.0) * std::max(std::abs(b), 1.0);
  if (z > 0.5 && spread <= 1.0 && std::abs(gap) <= kConnectionMaxGap && !nonpositive_int(a) && !nonpositive_int(b)) {
    if (gap >= 0.0) return near_one(a, b, c, z);
    return std::pow(1.0 - z, gap) * near_one(c - a, c - b, c, z);
  }
  // Terms behave like n^(a+b-c-1) z^n; Euler's form behaves like n^(c-a-b-1) z^n.
  if (z > 0.5 && a + b > c) {
    return std::pow(1.0 - z, c - a - b) * gauss_2f1_series(c - a, c - b, c, z);
  }
  return gauss_2f1_series(a, b, c, z);
}

double beta_shift_ratio(double a, double x, double d) {
  // B(a, x+d)/B(a, x) = [G(x+d)/G(x)] [G(a+x)/G(a+x+d)]
  //                   = delta_ratio(a+x, d) / delta_ratio(x, d)
  return boost::math::tgamma_delta_ratio(a + x, d) / boost::math::tgamma_delta_ratio(x, d);
}

}  // namespace snrloss
