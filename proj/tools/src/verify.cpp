#include "snrloss/app/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "snrloss/distributions.hpp"
#include "snrloss/experiment.hpp"
#include "snrloss/filters.hpp"
#include "snrloss/loss_law.hpp"
#include "snrloss/scenario.hpp"
#include "snrloss/special.hpp"
#include "snrloss/statistics.hpp"

namespace snrloss::app {

namespace {

using Clock = std::chrono::steady_clock;

// Streams for one-off draws (scenarios, transforms); trial streams count up from 0.
constexpr std::uint64_t kAuxStream = 0xFFFF'FFFF'FFFF'0000ULL;

bool quick(const VerifyOptions& o) { return o.level == VerifyLevel::kQuick; }

BetaParams mvdr_reference(int n, int k, const VerifyOptions& o) {
  BetaParams b = LossLaw::mvdr(n, k).beta();
  if (o.tamper_beta) std::swap(b.alpha, b.beta);
  return b;
}

std::vector<double> sorted_losses(const Scenario& s, const FilterSpec& f, int k, int trials,
                                  std::uint64_t seed, int threads) {
  ExperimentConfig c;
  c.scenario = s;
  c.filter = f;
  c.k = k;
  c.trials = trials;
  c.seed = seed;
  c.threads = threads;
  c.validate();
  std::vector<double> x = run_partial(c, 0, static_cast<std::uint64_t>(trials)).losses;
  std::sort(x.begin(), x.end());
  return x;
}

std::vector<double> smi_losses(const Scenario& s, int k, int trials, std::uint64_t seed, int threads) {
  return sorted_losses(s, FilterSpec{}, k, trials, seed, threads);
}

double power_for_snr(const HermitianMatrix& sigma, const ComplexVector& v, double target) {
  return target / snr_opt(sigma, v, 1.0);
}

template <typename F>
double integrate01(F f, double hi = 1.0) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, hi, 20, 1e-13, &err);
}

void add(std::string& detail, const std::string& part) {
  if (!detail.empty()) detail += "; ";
  detail += part;
}

CriterionResult a1(const VerifyOptions& o) {
  CriterionResult r{"A1", true, {}, 0.0};
  const int m = quick(o) ? 1000 : 100000;
  const auto ref = reference_scenario(16);
  {
    const BetaParams b = mvdr_reference(16, 29, o);
    const Moments mo = moments_of(smi_losses(make_mvdr(ref.sigma, ref.v), 29, m, o.seed, o.threads));
    const bool ok = std::abs(mo.mean - 0.5) <= 0.01 && std::abs(b.mean() - 0.5) < 1e-12;
    r.pass = r.pass && ok;
    add(r.detail, fmt::format("N=16 K=29 mean {:.4f} law {:.4f}", mo.mean, b.mean()));
  }
  const int pairs[][2] = {{8, 12}, {16, 32}, {16, 64}};
  for (const auto& p : pairs) {
    const auto sc = reference_scenario(p[0]);
    const BetaParams b = mvdr_reference(p[0], p[1], o);
    const Moments mo = moments_of(smi_losses(make_mvdr(sc.sigma, sc.v), p[1], m, o.seed + 1, o.threads));
    const double z = std::abs(mo.mean - b.mean()) / mo.std_error();
    r.pass = r.pass && z <= 3.0;
    add(r.detail, fmt::format("({},{}) z={:.2f}", p[0], p[1], z));
  }
  return r;
}

CriterionResult a2(const VerifyOptions& o) {
  CriterionResult r{"A2", true, {}, 0.0};
  const int m = quick(o) ? 1000 : 10000;
  const auto ref = reference_scenario(8);
  const BetaParams b = mvdr_reference(8, 16, o);
  const KsResult ks = ks_distance(smi_losses(make_mvdr(ref.sigma, ref.v), 16, m, o.seed, o.threads),
                                  [&b](double x) { return beta_cdf(x, b); });
  r.pass = ks.pass();
  r.detail = fmt::format("KS {:.4f} (threshold {:.4f})", ks.statistic, ks.threshold_1pct);
  return r;
}

CriterionResult a3(const VerifyOptions& o) {
  CriterionResult r{"A3", true, {}, 0.0};
  const int n = 16;
  const int k = 32;
  const auto ref = reference_scenario(n);
  const double p = power_for_snr(ref.sigma, ref.v, 100.0);
  const HermitianMatrix ct = ref.sigma.plus_rank_one(ref.v, p);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng(o.seed, kAuxStream + i);
    const HermitianMatrix st = sample_wishart(rng, n, k, ct);
    const Weight w = w_smi(st, ref.v);
    const double rho = snr_loss(w, ref.v, ref.sigma);
    const double predicted = mpdr_map(snr_loss(w, ref.v, ct), 100.0);
    worst = std::max(worst, std::abs(rho - predicted) / predicted);
  }
  r.pass = worst < 1e-9;
  add(r.detail, fmt::format("max rel err {:.2e}", worst));

  const int m = quick(o) ? 1000 : 10000;
  const Scenario s = make_mpdr(ref.sigma, ref.v, p);
  const LossLaw law = law_for_scenario(s, k);
  const KsResult ks = ks_distance(smi_losses(s, k, m, o.seed, o.threads),
                                  [&law](double x) { return cdf_rho(x, law); });
  r.pass = r.pass && ks.pass();
  add(r.detail, fmt::format("KS {:.4f} (threshold {:.4f})", ks.statistic, ks.threshold_1pct));
  return r;
}

CriterionResult a4(const VerifyOptions& o) {
  CriterionResult r{"A4", true, {}, 0.0};
  const int k = 32;
  const int m = quick(o) ? 1000 : 10000;
  const auto ref = reference_scenario(16);
  Rng rng(o.seed, kAuxStream + 4);
  const std::pair<const char*, Scenario> cases[] = {
      {"wishart_mismatch", make_wishart_mismatch(ref.sigma, ref.v, rng)},
      {"ger", make_ger(ref.sigma, ref.v, rng)},
      {"surprise", make_surprise_metric(ref.sigma, ref.v, 40.0, 10.0)},
  };
  const double threshold = 1.92 * std::sqrt(2.0 / m);
  for (const auto& [name, s] : cases) {
    const RouteReport rep = compare_routes(s, k, m, o.seed, o.threads);
    const double d = rep.direct_vs_representation.statistic;
    r.pass = r.pass && d < threshold;
    add(r.detail, fmt::format("{} {:.4f}", name, d));
  }
  add(r.detail, fmt::format("threshold {:.4f}", threshold));
  return r;
}

CriterionResult a5(const VerifyOptions& o) {
  CriterionResult r{"A5", true, {}, 0.0};
  const int n = 16;
  const int k = 32;
  const int m = quick(o) ? 1000 : 10000;
  const auto ref = reference_scenario(n);
  const Scenario s = make_student(ref.sigma, ref.v, 32.0);
  const LossLaw law = law_for_scenario(s, k);
  const KsResult ks = ks_distance(smi_losses(s, k, m, o.seed, o.threads),
                                  [&law](double x) { return cdf_rho(x, law); });
  add(r.detail, fmt::format("KS {:.4f} (threshold {:.4f})", ks.statistic, ks.threshold_1pct));

  const double mass = integrate01([&law](double x) { return pdf_rho(x, law); });
  const bool mass_ok = std::abs(mass - 1.0) < 1e-6;
  add(r.detail, fmt::format("mass-1 {:.1e}", mass - 1.0));

  const LossLaw wide = LossLaw::student(n, k, 1e6);
  const LossLaw mvdr = LossLaw::mvdr(n, k);
  double gap = 0.0;
  for (int j = 0; j < 1000; ++j) {
    const double x = (j + 0.5) / 1000.0;
    gap = std::max(gap, std::abs(pdf_rho(x, wide) - pdf_rho(x, mvdr)));
  }
  const bool gap_ok = gap < 1e-4;
  add(r.detail, fmt::format("nu=1e6 max pdf gap {:.2e} (tolerance 1e-4{})", gap, gap_ok ? "" : ", exceeded"));
  r.pass = ks.pass() && mass_ok && gap_ok;
  return r;
}

CriterionResult a6(const VerifyOptions& o) {
  CriterionResult r{"A6", true, {}, 0.0};
  const int n = 16;
  const int k = 16;
  const int rank = 4;
  const int m = 10000;
  const auto ref = reference_scenario(n);
  Rng rng(o.seed, kAuxStream + 6);
  FilterSpec f;
  f.kind = FilterKind::kPartial;
  f.r = rank;
  f.psi = rng.complex_normal_matrix(n - 1, rank);
  const double a = coef_a(make_gsc_transform(ref.v, f.psi), ref.sigma, ref.v);
  add(r.detail, fmt::format("a={:.4f}", a));

  const std::vector<double> mv = sorted_losses(make_mvdr(ref.sigma, ref.v), f, k, m, o.seed, o.threads);
  const bool bounded = mv.back() <= a + 1e-9;
  add(r.detail, fmt::format("max {:.4f}{}", mv.back(), bounded ? "" : " exceeds a"));
  const LossLaw pa = LossLaw::pa_mvdr(k, rank, a);
  const KsResult ks = ks_distance(mv, [&pa](double x) { return cdf_rho(x, pa); });
  add(r.detail, fmt::format("PA-MVDR KS {:.4f}", ks.statistic));

  const double p = power_for_snr(ref.sigma, ref.v, 10.0);
  const std::vector<double> mp =
      sorted_losses(make_mpdr(ref.sigma, ref.v, p), f, k, m, o.seed + 1, o.threads);
  const LossLaw pm = LossLaw::pa_mpdr(k, rank, a, 10.0);
  const KsResult ks2 = ks_distance(mp, [&pm](double x) { return cdf_rho(x, pm); });
  add(r.detail, fmt::format("PA-MPDR KS {:.4f} (threshold {:.4f})", ks2.statistic, ks2.threshold_1pct));
  r.pass = bounded && mp.back() <= a + 1e-9 && ks.pass() && ks2.pass();
  return r;
}

CriterionResult a7(const VerifyOptions& o) {
  CriterionResult r{"A7", true, {}, 0.0};
  const int n = 16;
  const int rank = 3;
  const int m = 10000;
  const auto ref = reference_scenario(n);
  const Scenario s = make_mvdr(ref.sigma, ref.v);
  const double lambda_r = eigh(ref.sigma).values(rank - 1);
  auto check_mean = [&](const char* name, const FilterSpec& f, int k) {
    const std::vector<double> x = sorted_losses(s, f, k, m, o.seed, o.threads);
    const double target = LossLaw::ec_approx(k, rank).beta().mean();
    const double mean = moments_of(x).mean;
    r.pass = r.pass && std::abs(mean - target) <= 0.05;
    add(r.detail, fmt::format("{} K={} mean {:.3f} vs {:.3f}", name, k, mean, target));
    return x;
  };
  FilterSpec ec;
  ec.kind = FilterKind::kEigencanceler;
  ec.r = rank;
  FilterSpec pc = ec;
  pc.kind = FilterKind::kPchol;
  for (int k : {6, 16}) {
    const std::vector<double> xe = check_mean("ec", ec, k);
    const std::vector<double> xp = sorted_losses(s, pc, k, m, o.seed + 1, o.threads);
    const double d = ks_two_sample(xp, xe).statistic;
    r.pass = r.pass && d < 0.05;
    add(r.detail, fmt::format("pchol-ec K={} KS {:.3f}", k, d));
  }
  FilterSpec dl;
  dl.kind = FilterKind::kDiagonalLoading;
  dl.mu = std::sqrt(s.gamma * lambda_r) / 6.0;
  check_mean("dl", dl, 6);
  return r;
}

struct WeightStats {
  std::vector<double> sum_re, sum_im, sum_abs2, sq_re, sq_im, sq_abs2;
  double norm2 = 0.0;
  std::size_t count = 0;

  explicit WeightStats(Eigen::Index n)
      : sum_re(n), sum_im(n), sum_abs2(n), sq_re(n), sq_im(n), sq_abs2(n) {}

  void add(const Weight& w) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double re = w(i).real();
      const double im = w(i).imag();
      const double a2 = std::norm(w(i));
      sum_re[i] += re;
      sum_im[i] += im;
      sum_abs2[i] += a2;
      sq_re[i] += re * re;
      sq_im[i] += im * im;
      sq_abs2[i] += a2 * a2;
    }
    norm2 += w.squaredNorm();
    ++count;
  }
};

// Mean and squared standard error of one accumulated column.
std::pair<double, double> mean_se2(double sum, double sq, std::size_t count) {
  const double c = static_cast<double>(count);
  const double mean = sum / c;
  return {mean, (sq / c - mean * mean) / c};
}

WeightStats collect(std::size_t count, Eigen::Index n, const std::function<Weight(std::uint64_t)>& draw,
                    int threads) {
  std::vector<Weight> ws(count);
  parallel_for(count, threads, [&](std::uint64_t i) { ws[i] = draw(i); });
  WeightStats st(n);
  for (const Weight& w : ws) st.add(w);
  return st;
}

CriterionResult a8(const VerifyOptions& o) {
  CriterionResult r{"A8", true, {}, 0.0};
  const int n = 16;
  const int k = 32;
  const std::size_t m = 100000;
  const auto ref = reference_scenario(n);
  const double p = power_for_snr(ref.sigma, ref.v, 10.0);
  const Scenario mvdr = make_mvdr(ref.sigma, ref.v);
  const Scenario mpdr = make_mpdr(ref.sigma, ref.v, p);

  auto direct = [&](const Scenario& s, std::uint64_t seed) {
    const TrainingSampler sampler(s);
    return collect(m, n, [&](std::uint64_t i) {
      Rng rng(seed, i);
      return w_smi(sampler.draw_covariance(rng, k), s.v);
    }, o.threads);
  };
  auto rep = [&](const Scenario& s, std::uint64_t seed) {
    return collect(m, n, [&](std::uint64_t i) {
      Rng rng(seed, i);
      return weight_rep(rng, s, k);
    }, o.threads);
  };
  const WeightStats d_mvdr = direct(mvdr, o.seed);
  const WeightStats d_mpdr = direct(mpdr, o.seed + 1);

  const ComplexMatrix vp = orth_complement(ref.v);
  const HermitianMatrix reduced = HermitianMatrix::from_product(vp.adjoint() * ref.sigma.matrix() * vp);
  const double predicted = p * inverse_pd(reduced).trace().real() / (k - n + 1);
  const double measured = (d_mpdr.norm2 - d_mvdr.norm2) / static_cast<double>(m);
  const double gap_err = std::abs(measured / predicted - 1.0);
  r.pass = gap_err < 0.02;
  add(r.detail, fmt::format("norm gap {:.4f} vs {:.4f}", measured, predicted));
  for (const auto* s : {&mvdr, &mpdr}) {
    const WeightStats& d = s == &mvdr ? d_mvdr : d_mpdr;
    const double e = expected_wnorm(s->ct, s->v, k);
    const double err = std::abs(d.norm2 / static_cast<double>(m) / e - 1.0);
    r.pass = r.pass && err < 0.02;
  }

  int failures = 0;
  int compared = 0;
  double worst = 0.0;
  for (const auto* s : {&mvdr, &mpdr}) {
    const WeightStats& d = s == &mvdr ? d_mvdr : d_mpdr;
    const WeightStats w = rep(*s, representation_seed(o.seed) + (s == &mvdr ? 0 : 1));
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::pair<double, double> a[] = {mean_se2(d.sum_re[i], d.sq_re[i], m),
                                             mean_se2(d.sum_im[i], d.sq_im[i], m),
                                             mean_se2(d.sum_abs2[i], d.sq_abs2[i], m)};
      const std::pair<double, double> b[] = {mean_se2(w.sum_re[i], w.sq_re[i], m),
                                             mean_se2(w.sum_im[i], w.sq_im[i], m),
                                             mean_se2(w.sum_abs2[i], w.sq_abs2[i], m)};
      for (int c = 0; c < 3; ++c) {
        const double z = std::abs(a[c].first - b[c].first) / std::sqrt(a[c].second + b[c].second);
        worst = std::max(worst, z);
        ++compared;
        if (z > 3.0) ++failures;
      }
    }
  }
  r.pass = r.pass && failures == 0;
  add(r.detail, fmt::format("rep moments {}/{} within 3 sigma (max z {:.2f})", compared - failures, compared, worst));
  return r;
}

CriterionResult a9(const VerifyOptions& o) {
  CriterionResult r{"A9", true, {}, 0.0};
  Rng rng(o.seed, kAuxStream + 9);
  const Eigen::Index n = 16;
  auto random_pd = [&](Eigen::Index dim) {
    const ComplexMatrix x = rng.complex_normal_matrix(dim, dim + 4);
    return HermitianMatrix::from_product(x * x.adjoint());
  };
  auto check = [&](const char* name, bool ok) {
    if (!ok) {
      r.pass = false;
      add(r.detail, fmt::format("{} FAILED", name));
    }
  };

  double recon = 0.0;
  double idem = 0.0;
  double nest = 0.0;
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix h = rng.complex_normal_matrix(n, n);
    const HermitianMatrix a(0.5 * (h + h.adjoint()));
    const EigenDecomp e = eigh(a);
    const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    recon = std::max(recon, relative_difference(back, a.matrix()));

    const HermitianMatrix proj = projector(rng.complex_normal_matrix(n, 5));
    idem = std::max(idem, (proj.matrix() * proj.matrix() - proj.matrix()).norm());

    const HermitianMatrix pd = random_pd(n);
    for (Eigen::Index rank = 1; rank < n; ++rank) {
      const ComplexMatrix g = partial_cholesky(pd, rank);
      const ComplexMatrix g1 = partial_cholesky(pd, rank + 1);
      nest = std::max(nest, (g1.leftCols(rank) - g).norm() / g.norm());
    }
    nest = std::max(nest, relative_difference(partial_cholesky(pd, n), cholesky_lower(pd)));
  }
  check("hermitian reconstruction", recon < 1e-9);
  check("projector idempotency", idem < 1e-10);
  check("partial Cholesky nesting", nest < 1e-10);

  const double f_log = gauss_2f1(1.0, 1.0, 2.0, 0.5);
  const double f_raw = gauss_2f1(3.0, 2.0, 5.0, 0.3);
  const double f_euler = gauss_2f1(2.5, 1.5, 1.5, 0.9);
  check("2F1 log identity", std::abs(f_log - 2.0 * std::numbers::ln2) < 1e-12 * f_log);
  check("2F1 series", std::abs(f_raw / gauss_2f1_series(3.0, 2.0, 5.0, 0.3, 1e-15) - 1.0) < 1e-12);
  check("2F1 Euler branch", std::abs(f_euler / std::pow(0.1, -2.5) - 1.0) < 1e-12);
  check("2F1 at zero", gauss_2f1(4.0, 7.0, 3.0, 0.0) == 1.0);

  double mass = 0.0;
  for (const BetaParams b : {BetaParams{1, 1}, BetaParams{18, 15}, BetaParams{3, 14}, BetaParams{30, 4}}) {
    mass = std::max(mass, std::abs(integrate01([&b](double x) { return beta_pdf(x, b); }) - 1.0));
  }
  check("Beta normalization", mass < 1e-8);
  add(r.detail, fmt::format("recon {:.1e}, idem {:.1e}, nest {:.1e}, beta mass {:.1e}", recon, idem, nest, mass));

  if (!quick(o)) {
    VerifyOptions q = o;
    q.level = VerifyLevel::kQuick;
    q.threads = 1;
    const auto t0 = Clock::now();
    run_verify(q);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    check("quick verify runtime", secs < 120.0);
    add(r.detail, fmt::format("quick single-thread {:.1f} s", secs));
  }
  return r;
}

}  // namespace

ReferenceScenario reference_scenario(Eigen::Index n) {
  const SigmaBuild b = build_sigma(n, reference_interferers(), 1.0);
  return {b.sigma, b.g, ula_steering(n, 0.0)};
}

std::vector<std::string> criterion_ids(VerifyLevel level) {
  if (level == VerifyLevel::kQuick) return {"A1", "A2", "A3", "A4", "A5"};
  return {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9"};
}

CriterionResult run_criterion(const std::string& id, const VerifyOptions& options) {
  using Fn = CriterionResult (*)(const VerifyOptions&);
  struct Entry {
    const char* id;
    Fn fn;
    double limit_s;
  };
  static const Entry table[] = {
      {"A1", a1, 120.0}, {"A2", a2, 60.0}, {"A3", a3, 0.0}, {"A4", a4, 0.0}, {"A5", a5, 0.0},
      {"A6", a6, 0.0},   {"A7", a7, 0.0},  {"A8", a8, 0.0}, {"A9", a9, 0.0},
  };
  for (const auto& [name, fn, limit] : table) {
    if (id != name) continue;
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = fn(options);
    } catch (const std::exception& e) {
      r = {id, false, std::string("error: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit > 0.0 && r.seconds >= limit) {
      r.pass = false;
      add(r.detail, fmt::format("over the {:.0f} s budget", limit));
    }
    return r;
  }
  throw Error(ErrorCode::kBadParam, "unknown criterion '" + id + "'");
}

std::vector<CriterionResult> run_verify(const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const std::string& id : criterion_ids(options.level)) {
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{:<3} {}  ({:.1f} s)  {}", r.id, r.pass ? "PASS" : "FAIL", r.seconds, r.detail);
}

}  // namespace snrloss::app
