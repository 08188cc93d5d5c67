#include "snrloss/app/figures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "snrloss/app/csv.hpp"
#include "snrloss/experiment.hpp"
#include "snrloss/filters.hpp"
#include "snrloss/loss_law.hpp"
#include "snrloss/scenario.hpp"
#include "snrloss/serialization.hpp"

namespace snrloss::app {

namespace {

constexpr std::uint64_t kDrawStream = 0xFFFF'FFFF'FFFE'0000ULL;

double parse_number(const std::string& key, std::string_view text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw Error(ErrorCode::kConfigError, "override '" + key + "': '" + std::string(text) + "' is not a number");
  }
  return x;
}

struct Curve {
  std::string name;
  Json params;
  std::optional<ExperimentConfig> mc;
  std::optional<LossLaw> law;
};

struct Context {
  std::string figure;
  const FigureOptions& options;
  std::filesystem::path dir;
  int bins = 100;
  std::vector<std::filesystem::path> files;
};

ExperimentConfig config_for(const Context& ctx, const Scenario& s, int k, std::size_t index,
                            FilterSpec filter = {}) {
  ExperimentConfig c;
  c.scenario = s;
  c.filter = std::move(filter);
  c.k = k;
  c.trials = ctx.options.trials;
  c.seed = ctx.options.seed + index;
  c.bins = ctx.bins;
  c.threads = ctx.options.threads;
  return c;
}

std::vector<double> density_of(const Histogram& h) {
  std::vector<double> d(h.counts.size());
  const double norm = static_cast<double>(h.total()) * h.bin_width();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = norm > 0.0 ? static_cast<double>(h.counts[i]) / norm : 0.0;
  return d;
}

void emit_density(Context& ctx, const Curve& c) {
  const std::size_t bins = static_cast<std::size_t>(ctx.bins);
  std::vector<std::optional<double>> exact(bins), empirical(bins), represented(bins);
  Json sidecar = {{"figure", ctx.figure},
                  {"curve", c.name},
                  {"seed", ctx.options.seed},
                  {"trials", ctx.options.trials},
                  {"bins", ctx.bins},
                  {"parameters", c.params},
                  {"overrides", ctx.options.overrides.values()}};
  if (c.mc) {
    const ExperimentResult r = run_experiment(*c.mc);
    const std::vector<double> d = density_of(r.histogram);
    for (std::size_t i = 0; i < bins; ++i) empirical[i] = d[i];
    sidecar["experiment"] = *c.mc;
    sidecar["empirical_mean"] = r.moments.mean;
  }
  if (c.law) {
    const LossLaw& law = *c.law;
    if (law.has_closed_form()) {
      for (std::size_t i = 0; i < bins; ++i) exact[i] = pdf_rho((static_cast<double>(i) + 0.5) / ctx.bins, law);
    }
    const std::uint64_t seed = representation_seed(c.mc ? c.mc->seed : ctx.options.seed);
    const auto draws = sample_law(law, static_cast<std::uint64_t>(ctx.options.trials), seed, ctx.options.threads);
    const std::vector<double> d = density_of(histogram_of(draws, bins));
    for (std::size_t i = 0; i < bins; ++i) represented[i] = d[i];
    sidecar["law"] = law;
    sidecar["representation_seed"] = seed;
  }
  CsvTable t;
  t.header = {"rho", "density", "empirical_density", "representation_density"};
  auto cell = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string(); };
  for (std::size_t i = 0; i < bins; ++i) {
    t.rows.push_back({format_number((static_cast<double>(i) + 0.5) / ctx.bins), cell(exact[i]), cell(empirical[i]),
                      cell(represented[i])});
  }
  ctx.files.push_back(write_csv_with_sidecar(ctx.dir, ctx.figure + "_" + c.name, t, std::move(sidecar)));
}

std::string tag(double x) { return format_number(x); }

// Psi whose range lies within 45 degrees of range(V_perp^H G).
ComplexMatrix aligned_psi(Rng& rng, const ComplexMatrix& vp, const ComplexMatrix& g, int r) {
  const ComplexMatrix target = vp.adjoint() * g;
  const Eigen::Index dim = target.rows();
  const ComplexMatrix qg = Eigen::HouseholderQR<ComplexMatrix>(target).householderQ() *
                           ComplexMatrix::Identity(dim, target.cols());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    ComplexMatrix psi = rng.complex_normal_matrix(dim, r) * 0.1;
    const Eigen::Index shared = std::min<Eigen::Index>(r, qg.cols());
    psi.leftCols(shared) += qg.leftCols(shared);
    const ComplexMatrix qp = Eigen::HouseholderQR<ComplexMatrix>(psi).householderQ() *
                             ComplexMatrix::Identity(dim, r);
    const Eigen::JacobiSVD<ComplexMatrix> svd(qg.leftCols(shared).adjoint() * qp);
    if (svd.singularValues().minCoeff() >= std::sqrt(0.5)) return psi;
  }
  throw Error(ErrorCode::kNoConvergence, "could not draw an aligned Psi");
}

void fig_fa_mvdr(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const auto ref = reference_scenario(n);
  const Scenario s = make_mvdr(ref.sigma, ref.v);
  std::size_t i = 0;
  for (double k : ov.get_list("K", {20, 24, 32, 48, 64})) {
    const int kk = static_cast<int>(k);
    emit_density(ctx, {"K" + tag(k), {{"N", n}, {"K", kk}}, config_for(ctx, s, kk, i++), LossLaw::mvdr(n, kk)});
  }
}

void fig_mpdr(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int k = ov.get_int("K", 2 * n);
  const auto ref = reference_scenario(n);
  std::size_t i = 0;
  for (double snr : ov.get_list("snr", {0, 10, 100})) {
    const Scenario s = make_mpdr(ref.sigma, ref.v, snr / snr_opt(ref.sigma, ref.v, 1.0));
    emit_density(ctx, {"snr" + tag(snr), {{"N", n}, {"K", k}, {"snr_opt_over_gamma", snr}},
                       config_for(ctx, s, k, i++), LossLaw::mpdr(n, k, snr)});
  }
}

void fig_ger_undernulled(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int k = ov.get_int("K", 2 * n);
  const double angle = ov.get_double("q_angle", 40.0);
  const auto ref = reference_scenario(n);
  std::size_t i = 0;
  for (double qm : ov.get_list("q_metric", {0, 1, 10, 100})) {
    const Scenario s = make_surprise_metric(ref.sigma, ref.v, angle, qm);
    emit_density(ctx, {"q" + tag(qm), {{"N", n}, {"K", k}, {"q_metric", qm}, {"q_angle", angle}},
                       config_for(ctx, s, k, i++), law_for_scenario(s, k)});
  }
}

template <typename Make>
void fig_mismatch(Context& ctx, const Overrides& ov, Make make) {
  const int n = ov.get_int("N", 16);
  const int k = ov.get_int("K", 2 * n);
  const int draws = ov.get_int("draws", 5);
  const auto ref = reference_scenario(n);
  const Scenario base = make_mvdr(ref.sigma, ref.v);
  emit_density(ctx, {"mvdr", {{"N", n}, {"K", k}}, config_for(ctx, base, k, 0), LossLaw::mvdr(n, k)});
  for (int d = 0; d < draws; ++d) {
    Rng rng(ctx.options.seed, kDrawStream + static_cast<std::uint64_t>(d));
    const Scenario s = make(ref, rng);
    emit_density(ctx, {"draw" + std::to_string(d), {{"N", n}, {"K", k}, {"draw", d}, {"eta", s.extras.eta}},
                       config_for(ctx, s, k, static_cast<std::size_t>(d) + 1), law_for_scenario(s, k)});
  }
}

void fig_student_vs_nu(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int k = ov.get_int("K", 2 * n);
  const auto ref = reference_scenario(n);
  std::size_t i = 0;
  for (double nu : ov.get_list("nu", {20, 32, 64, 256})) {
    const Scenario s = make_student(ref.sigma, ref.v, nu);
    emit_density(ctx, {"nu" + tag(nu), {{"N", n}, {"K", k}, {"nu", nu}, {"mu", s.extras.mu}},
                       config_for(ctx, s, k, i++), LossLaw::student(n, k, nu)});
  }
}

void fig_student_vs_k(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const double nu = ov.get_double("nu", 2.0 * n);
  const auto ref = reference_scenario(n);
  const Scenario s = make_student(ref.sigma, ref.v, nu);
  std::size_t i = 0;
  for (double k : ov.get_list("K", {20, 24, 32, 48, 64})) {
    const int kk = static_cast<int>(k);
    emit_density(ctx, {"K" + tag(k), {{"N", n}, {"K", kk}, {"nu", nu}, {"mu", s.extras.mu}},
                       config_for(ctx, s, kk, i++), LossLaw::student(n, kk, nu)});
  }
}

void fig_pa_mvdr_grid(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int r = ov.get_int("R", n / 4);
  const int random_draws = ov.get_int("draws", 3);
  const auto ref = reference_scenario(n);
  const Scenario s = make_mvdr(ref.sigma, ref.v);
  const ComplexMatrix vp = orth_complement(ref.v);
  std::size_t i = 0;
  for (double k : ov.get_list("K", {static_cast<double>(n), 2.0 * n})) {
    const int kk = static_cast<int>(k);
    for (int d = 0; d <= random_draws; ++d) {
      Rng rng(ctx.options.seed, kDrawStream + static_cast<std::uint64_t>(d));
      const bool aligned = d == random_draws;
      FilterSpec f;
      f.kind = FilterKind::kPartial;
      f.r = r;
      f.psi = aligned ? aligned_psi(rng, vp, ref.g, r) : rng.complex_normal_matrix(n - 1, r);
      const double a = coef_a(make_gsc_transform(ref.v, f.psi), ref.sigma, ref.v);
      const std::string name = "K" + tag(k) + (aligned ? "_aligned" : "_psi" + std::to_string(d));
      emit_density(ctx, {name, {{"N", n}, {"K", kk}, {"R", r}, {"a", a}, {"aligned", aligned}},
                         config_for(ctx, s, kk, i++, f), LossLaw::pa_mvdr(kk, r, std::min(a, 1.0))});
    }
  }
}

void fig_a_vs_psi(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int r = ov.get_int("R", n / 4);
  const int trials = ov.get_int("draws", 100);
  const auto ref = reference_scenario(n);
  const ComplexMatrix vp = orth_complement(ref.v);
  CsvTable t;
  t.header = {"trial", "a_random", "a_aligned"};
  for (int d = 0; d < trials; ++d) {
    Rng rng(ctx.options.seed, kDrawStream + static_cast<std::uint64_t>(d));
    const ComplexMatrix random = rng.complex_normal_matrix(n - 1, r);
    const ComplexMatrix aligned = aligned_psi(rng, vp, ref.g, r);
    t.rows.push_back({std::to_string(d), format_number(coef_a(make_gsc_transform(ref.v, random), ref.sigma, ref.v)),
                      format_number(coef_a(make_gsc_transform(ref.v, aligned), ref.sigma, ref.v))});
  }
  Json sidecar = {{"figure", ctx.figure},
                  {"seed", ctx.options.seed},
                  {"parameters", {{"N", n}, {"R", r}, {"draws", trials}, {"max_angle_deg", 45}}},
                  {"overrides", ctx.options.overrides.values()}};
  ctx.files.push_back(write_csv_with_sidecar(ctx.dir, ctx.figure, t, std::move(sidecar)));
}

void fig_ec_vs_k(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int r = ov.get_int("R", 3);
  const auto ref = reference_scenario(n);
  const Scenario s = make_mvdr(ref.sigma, ref.v);
  FilterSpec f;
  f.kind = FilterKind::kEigencanceler;
  f.r = r;
  std::size_t i = 0;
  for (double k : ov.get_list("K", {6, 8, 16, 32})) {
    const int kk = static_cast<int>(k);
    emit_density(ctx, {"K" + tag(k), {{"N", n}, {"K", kk}, {"R", r}}, config_for(ctx, s, kk, i++, f),
                       LossLaw::ec_approx(kk, r)});
  }
}

void fig_marzetta(Context& ctx, const Overrides& ov, int default_r) {
  const int n = ov.get_int("N", 16);
  const int k = ov.get_int("K", 6);
  const int r = ov.get_int("R", default_r);
  const auto ref = reference_scenario(n);
  const Scenario s = make_mvdr(ref.sigma, ref.v);
  std::size_t i = 0;
  for (double l : ov.get_list("L", {1, 4, 16, 64})) {
    FilterSpec f;
    f.kind = FilterKind::kMarzetta;
    f.r = r;
    f.l = static_cast<int>(l);
    emit_density(ctx, {"L" + tag(l), {{"N", n}, {"K", k}, {"R", r}, {"L", f.l}}, config_for(ctx, s, k, i++, f),
                       LossLaw::ec_approx(k, r)});
  }
}

void fig_dl(Context& ctx, const Overrides& ov) {
  const int n = ov.get_int("N", 16);
  const int k = ov.get_int("K", 6);
  const int r = ov.get_int("R", 3);
  const auto ref = reference_scenario(n);
  const Scenario s = make_mvdr(ref.sigma, ref.v);
  std::size_t i = 0;
  // Loading levels K mu / gamma.
  for (double load : ov.get_list("load", {0.1, 10, 100, 1e4, 1e6})) {
    FilterSpec f;
    f.kind = FilterKind::kDiagonalLoading;
    f.mu = load * s.gamma / k;
    emit_density(ctx, {"load" + tag(load), {{"N", n}, {"K", k}, {"R", r}, {"load", load}, {"mu", f.mu}},
                       config_for(ctx, s, k, i++, f), LossLaw::dl_approx(k, r)});
  }
}

}  // namespace

void Overrides::add(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kConfigError, "override '" + assignment + "' must look like key=value");
  }
  values_[assignment.substr(0, eq)] = assignment.substr(eq + 1);
}

double Overrides::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_number(key, it->second);
}

int Overrides::get_int(const std::string& key, int fallback) const {
  const double x = get_double(key, fallback);
  if (x != std::floor(x)) throw Error(ErrorCode::kConfigError, "override '" + key + "' must be an integer");
  return static_cast<int>(x);
}

std::vector<double> Overrides::get_list(const std::string& key, std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::string_view rest = it->second;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_number(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void Overrides::require_known(const std::vector<std::string>& known, const std::string& context) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::kConfigError, "override '" + key + "' is not a parameter of " + context);
    }
  }
}

std::vector<std::string> figure_ids() {
  return {"fa_mvdr",       "mpdr_K32",     "ger_undernulled", "ger_mismatch", "general_mismatch",
          "student_vs_nu", "student_vs_K", "pa_mvdr_grid",    "a_vs_psi",     "ec_vs_K",
          "marzetta_R3",   "marzetta_R4",  "dl"};
}

std::vector<std::filesystem::path> run_figure(const std::string& id, const FigureOptions& options,
                                              const std::filesystem::path& out_dir) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"fa_mvdr", {"N", "K"}},
      {"mpdr_K32", {"N", "K", "snr"}},
      {"ger_undernulled", {"N", "K", "q_angle", "q_metric"}},
      {"ger_mismatch", {"N", "K", "draws"}},
      {"general_mismatch", {"N", "K", "draws", "eta_db_lo", "eta_db_hi", "dof"}},
      {"student_vs_nu", {"N", "K", "nu"}},
      {"student_vs_K", {"N", "K", "nu"}},
      {"pa_mvdr_grid", {"N", "K", "R", "draws"}},
      {"a_vs_psi", {"N", "R", "draws"}},
      {"ec_vs_K", {"N", "K", "R"}},
      {"marzetta_R3", {"N", "K", "R", "L"}},
      {"marzetta_R4", {"N", "K", "R", "L"}},
      {"dl", {"N", "K", "R", "load"}},
  };
  const auto known = keys.find(id);
  if (known == keys.end()) throw Error(ErrorCode::kUnknownFigure, "unknown figure '" + id + "'");
  std::vector<std::string> allowed = known->second;
  allowed.push_back("bins");
  const Overrides& ov = options.overrides;
  ov.require_known(allowed, "figure " + id);
  Context ctx{id, options, out_dir, 100, {}};
  ctx.bins = ov.get_int("bins", 100);
  if (ctx.bins < 1) throw Error(ErrorCode::kConfigError, "override 'bins' must be positive");
  if (options.trials < 100) throw Error(ErrorCode::kConfigError, "trials: M must be >= 100");

  if (id == "fa_mvdr") {
    fig_fa_mvdr(ctx, ov);
  } else if (id == "mpdr_K32") {
    fig_mpdr(ctx, ov);
  } else if (id == "ger_undernulled") {
    fig_ger_undernulled(ctx, ov);
  } else if (id == "ger_mismatch") {
    fig_mismatch(ctx, ov, [](const ReferenceScenario& ref, Rng& rng) { return make_ger(ref.sigma, ref.v, rng); });
  } else if (id == "general_mismatch") {
    const double lo = ov.get_double("eta_db_lo", -6.0);
    const double hi = ov.get_double("eta_db_hi", 6.0);
    const double dof = ov.get_double("dof", 0.0);
    fig_mismatch(ctx, ov, [&](const ReferenceScenario& ref, Rng& rng) {
      return make_wishart_mismatch(ref.sigma, ref.v, rng, lo, hi, dof);
    });
  } else if (id == "student_vs_nu") {
    fig_student_vs_nu(ctx, ov);
  } else if (id == "student_vs_K") {
    fig_student_vs_k(ctx, ov);
  } else if (id == "pa_mvdr_grid") {
    fig_pa_mvdr_grid(ctx, ov);
  } else if (id == "a_vs_psi") {
    fig_a_vs_psi(ctx, ov);
  } else if (id == "ec_vs_K") {
    fig_ec_vs_k(ctx, ov);
  } else if (id == "marzetta_R3") {
    fig_marzetta(ctx, ov, 3);
  } else if (id == "marzetta_R4") {
    fig_marzetta(ctx, ov, 4);
  } else if (id == "dl") {
    fig_dl(ctx, ov);
  } else {
    throw Error(ErrorCode::kUnknownFigure, "unknown figure '" + id + "'");
  }
  return ctx.files;
}

}  // namespace snrloss::app
