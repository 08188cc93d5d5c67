#include "snrloss/app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "snrloss/app/csv.hpp"
#include "snrloss/app/figures.hpp"
#include "snrloss/app/verify.hpp"
#include "snrloss/experiment.hpp"
#include "snrloss/serialization.hpp"
#include "snrloss/version.hpp"

namespace snrloss::app {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

std::filesystem::path out_dir(const CommonOptions& o) { return o.out.empty() ? "snrloss-out" : o.out; }

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json parse_document(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    config_error(fmt::format("{}:{}:{}: invalid JSON", name, line, col));
  }
}

// A value is taken as JSON when it parses as such, otherwise as a string.
Json override_value(const std::string& text) {
  Json v = Json::parse(text, nullptr, false);
  return v.is_discarded() ? Json(text) : v;
}

void apply_overrides(Json& doc, const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) config_error("override '" + a + "' must look like key=value");
    std::string pointer = "/" + a.substr(0, eq);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    try {
      doc[Json::json_pointer(pointer)] = override_value(a.substr(eq + 1));
    } catch (const Json::exception& e) {
      config_error("override '" + a + "': " + e.what());
    }
  }
}

CsvTable histogram_table(const Histogram& h) {
  CsvTable t;
  t.header = {"bin_left", "bin_right", "count"};
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    t.rows.push_back({format_number(h.left(i)), format_number(h.right(i)), std::to_string(h.counts[i])});
  }
  return t;
}

CsvTable samples_table(const std::vector<double>& samples) {
  CsvTable t;
  t.header = {"sample_index", "loss"};
  for (std::size_t i = 0; i < samples.size(); ++i) t.rows.push_back({std::to_string(i), format_number(samples[i])});
  return t;
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
  if (flag) return *flag;
  const char* env = std::getenv("SNRLOSS_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, seed);
  if (res.ec != std::errc{} || res.ptr != end) config_error(std::string("SNRLOSS_SEED: '") + env + "' is not an unsigned integer");
  return seed;
}

int cmd_figure(const std::string& id, const CommonOptions& o, std::ostream& out) {
  FigureOptions f;
  f.seed = resolve_seed(o.seed, kDefaultSeed);
  f.trials = o.trials.value_or(10000);
  f.threads = o.threads;
  for (const std::string& a : o.overrides) f.overrides.add(a);
  for (const auto& path : run_figure(id, f, out_dir(o))) out << path.string() << "\n";
  return kExitOk;
}

int cmd_experiment(const std::filesystem::path& config, const CommonOptions& o, std::ostream& out) {
  const std::string text = read_text(config);
  Json doc = parse_document(text, config.filename().string());
  if (!doc.is_object()) config_error(config.filename().string() + ": top level must be an object");
  apply_overrides(doc, o.overrides);
  if (o.trials) doc["trials"] = *o.trials;
  doc["seed"] = resolve_seed(o.seed, doc.contains("seed") ? doc["seed"].get<std::uint64_t>() : kDefaultSeed);

  ExperimentConfig cfg;
  try {
    cfg = doc.get<ExperimentConfig>();
  } catch (const Json::exception& e) {
    config_error(e.what());
  }
  cfg.threads = o.threads;
  const ExperimentResult r = run_experiment(cfg);

  const auto dir = out_dir(o);
  write_text(dir / "result.json", Json(r).dump(2) + "\n");
  const Json sidecar = {{"seed", cfg.seed}, {"config", cfg}};
  write_csv_with_sidecar(dir, "histogram", histogram_table(r.histogram), sidecar);
  write_csv_with_sidecar(dir, "samples", samples_table(r.samples), sidecar);

  bool all_pass = true;
  out << fmt::format("trials {}  mean {:.6f}  variance {:.6g}\n", r.trials, r.moments.mean, r.moments.variance);
  for (const KsTargetResult& t : r.ks_results) {
    all_pass = all_pass && t.ks.pass();
    out << fmt::format("KS vs {:<14} {:.5f} (threshold {:.5f}) {}{}\n", to_string(t.law.kind), t.ks.statistic,
                       t.ks.threshold_1pct, t.ks.pass() ? "pass" : "FAIL", t.empirical_cdf ? " [empirical cdf]" : "");
  }
  out << "wrote " << dir.string() << "\n";
  return all_pass ? kExitOk : kExitFailure;
}

int cmd_pdf(const std::string& kind, int points, const CommonOptions& o, std::ostream& out) {
  if (points < 2) config_error("points: need at least 2");
  static const std::vector<std::string> fields = {"N", "K", "R", "snr_opt_over_gamma", "lambda", "omega_eigs",
                                                  "deltas", "nu", "a", "a_prime", "q_metric"};
  Json doc = {{"kind", kind}};
  for (const std::string& a : o.overrides) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) config_error("override '" + a + "' must look like key=value");
    const std::string key = a.substr(0, eq);
    if (std::find(fields.begin(), fields.end(), key) == fields.end()) {
      config_error("override '" + key + "' is not a law parameter");
    }
    doc[key] = override_value(a.substr(eq + 1));
  }
  LossLaw law;
  try {
    law = doc.get<LossLaw>();
  } catch (const Json::exception& e) {
    config_error(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    config_error(std::string("law: ") + e.what());
  }
  CsvTable t;
  t.header = {"rho", "pdf", "cdf"};
  const double hi = law.support_max();
  for (int j = 0; j < points; ++j) {
    const double rho = hi * j / (points - 1);
    const std::string pdf = law.has_closed_form() ? format_number(pdf_rho(rho, law)) : std::string();
    t.rows.push_back({format_number(rho), pdf, format_number(cdf_rho(rho, law))});
  }
  if (o.out.empty()) {
    out << write_csv(t);
  } else {
    const Json sidecar = {{"law", law}, {"points", points}, {"empirical_cdf", cdf_is_empirical(law)}};
    out << write_csv_with_sidecar(o.out, "pdf_" + kind, t, sidecar).string() << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& level, bool tamper_beta, const CommonOptions& o, std::ostream& out) {
  VerifyOptions v;
  if (level == "quick") {
    v.level = VerifyLevel::kQuick;
  } else if (level == "full") {
    v.level = VerifyLevel::kFull;
  } else {
    config_error("verify level must be 'quick' or 'full'");
  }
  v.seed = resolve_seed(o.seed, kDefaultSeed);
  v.threads = o.threads;
  v.tamper_beta = tamper_beta;
  out << fmt::format("snrloss {} verify {} (seed {})\n", kVersion, level, v.seed);
  int failed = 0;
  run_verify(v, [&](const CriterionResult& r) {
    if (!r.pass) ++failed;
    out << format_result(r) << "\n" << std::flush;
  });
  out << (failed == 0 ? std::string("all criteria passed\n") : fmt::format("{} criteria failed\n", failed));
  return failed == 0 ? kExitOk : kExitFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SNR loss laws of adaptive filters: figures, experiments, densities and acceptance checks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&common](CLI::App* sub, bool with_trials, bool with_out, bool with_overrides) {
    sub->add_option("--seed", common.seed, "Master seed (default: $SNRLOSS_SEED or built-in)");
    sub->add_option("--threads", common.threads, "Worker threads, 0 = all cores; never changes results")
        ->check(CLI::NonNegativeNumber);
    if (with_trials) sub->add_option("--trials", common.trials, "Monte Carlo trials M")->check(CLI::PositiveNumber);
    if (with_out) sub->add_option("--out", common.out, "Output directory");
    if (with_overrides) sub->add_option("--override", common.overrides, "key=value parameter override");
  };

  std::string figure_id;
  auto* figure = app.add_subcommand("figure", "Write the CSV curves of one figure");
  figure->add_option("id", figure_id, "Figure id")->required();
  add_common(figure, true, true, true);
  figure->footer("Figures: " + [] {
    std::string s;
    for (const auto& id : figure_ids()) s += (s.empty() ? "" : ", ") + id;
    return s;
  }());

  std::filesystem::path config_path;
  auto* experiment = app.add_subcommand("experiment", "Run a configured Monte Carlo experiment");
  experiment->add_option("config", config_path, "Experiment JSON")->required();
  add_common(experiment, true, true, true);

  std::string law_kind;
  int points = 101;
  auto* pdf = app.add_subcommand("pdf", "Evaluate a loss law on a grid");
  pdf->add_option("kind", law_kind, "Law kind (mvdr, mpdr, student, pa_mvdr, ...)")->required();
  pdf->add_option("--points", points, "Grid points on [0, support]");
  add_common(pdf, false, true, true);

  std::string level;
  bool tamper = false;
  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("level", level, "quick or full")->required()->check(CLI::IsMember({"quick", "full"}));
  verify->add_flag("--tamper-beta", tamper, "Test hook: corrupt the reference Beta law")->group("");
  add_common(verify, false, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*figure) return cmd_figure(figure_id, common, out);
    if (*experiment) return cmd_experiment(config_path, common, out);
    if (*pdf) return cmd_pdf(law_kind, points, common, out);
    if (*verify) return cmd_verify(level, tamper, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace snrloss::app
