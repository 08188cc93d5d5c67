#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snrloss/app/commands.hpp"
#include "snrloss/app/csv.hpp"
#include "snrloss/app/figures.hpp"
#include "snrloss/error.hpp"
#include "snrloss/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snrloss::app;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "snrloss");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("snrloss-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class EnvGuard {
 public:
  explicit EnvGuard(const char* name) : name_(name) {
    if (const char* v = std::getenv(name)) old_ = v;
  }
  ~EnvGuard() {
    if (old_) {
      setenv(name_, old_->c_str(), 1);
    } else {
      unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

void write_config(const fs::path& path, int n, int k) {
  json sigma = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back({i == j ? 1.0 : 0.0, 0.0});
    sigma.push_back(row);
  }
  json v = json::array();
  for (int i = 0; i < n; ++i) v.push_back({1.0, 0.0});
  const json doc = {{"scenario", {{"kind", "mvdr"}, {"sigma", sigma}, {"ct", sigma}, {"v", v}, {"soi_power", 0.0}, {"gamma", 1.0}}},
                    {"filter", {{"kind", "smi"}}},
                    {"trials", 500},
                    {"K", k},
                    {"ks_targets", json::array({{{"kind", "mvdr"}, {"N", n}, {"K", k}}})}};
  write_text(path, doc.dump(2));
}

json without_runtime(const fs::path& p) {
  json j = json::parse(read_text(p));
  j.erase("runtime_ms");
  return j;
}

}  // namespace

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double x = i % 3 == 0 ? u(gen) * 1e-300 : u(gen);
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "");
}

TEST(Csv, QuotingFollowsTheStandard) {
  CsvTable t;
  t.header = {"a", "b,c", "d"};
  t.rows = {{"1", "say \"hi\"", "line\r\nbreak"}, {"", "plain", "x"}};
  const std::string text = write_csv(t);
  EXPECT_EQ(text, "a,\"b,c\",d\r\n1,\"say \"\"hi\"\"\",\"line\r\nbreak\"\r\n,plain,x\r\n");
  EXPECT_EQ(parse_csv(text), t);
  EXPECT_EQ(write_csv(parse_csv(text)), text);
}

TEST(Csv, MalformedInputIsConfigError) {
  for (const std::string bad : {"a,b\r\n1\r\n", "a\r\n\"open\r\n", "a\r\nx\"y\r\n"}) {
    try {
      parse_csv(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const snrloss::Error& e) {
      EXPECT_EQ(e.code(), snrloss::ErrorCode::kConfigError);
    }
  }
}

TEST(Overrides, TypedLookup) {
  Overrides o;
  o.add("N=8");
  o.add("K=10,20,40");
  o.add("snr=1e2");
  EXPECT_EQ(o.get_int("N", 16), 8);
  EXPECT_EQ(o.get_int("R", 4), 4);
  EXPECT_EQ(o.get_double("snr", 0.0), 100.0);
  EXPECT_EQ(o.get_list("K", {}), (std::vector<double>{10, 20, 40}));
  EXPECT_THROW(o.add("nonsense"), snrloss::Error);
  EXPECT_THROW(o.require_known({"N", "K"}, "fig"), snrloss::Error);
  o.add("N=eight");
  EXPECT_THROW(o.get_int("N", 16), snrloss::Error);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"dance"}).code, kExitUsage);
  EXPECT_EQ(cli({"figure"}).code, kExitUsage);
  EXPECT_EQ(cli({"verify", "medium"}).code, kExitUsage);
  EXPECT_EQ(cli({"figure", "fa_mvdr", "--trials", "-3"}).code, kExitUsage);
  const CliRun r = cli({"figure", "no_such_figure"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, HelpAndVersionSucceed) {
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  const CliRun v = cli({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_NE(v.out.find(snrloss::kVersion), std::string::npos);
}

TEST(Cli, UnknownOverrideKeyIsUsageError) {
  TempDir d;
  const CliRun r = cli({"figure", "fa_mvdr", "--out", d.path().string(), "--override", "bogus=1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST(Cli, SmallFigureWritesCsvAndSidecar) {
  TempDir d;
  const auto start = std::chrono::steady_clock::now();
  const CliRun r = cli({"figure", "fa_mvdr", "--out", d.path().string(), "--trials", "2000", "--seed", "5", "--override",
                     "N=8", "--override", "K=10,16"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LT(secs, 60.0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(d.path())) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    const std::string text = read_text(e.path());
    const CsvTable t = parse_csv(text);
    EXPECT_EQ(write_csv(t), text);
    EXPECT_EQ(t.header.front(), "rho");
    fs::path side = e.path();
    side.replace_extension(".json");
    ASSERT_TRUE(fs::exists(side));
    const json s = json::parse(read_text(side));
    EXPECT_EQ(s["seed"], 5);
    EXPECT_EQ(s["trials"], 2000);
    EXPECT_EQ(s["version"], snrloss::kVersion);
    EXPECT_EQ(s["parameters"]["N"], 8);
  }
  EXPECT_EQ(csvs, 2);
}

TEST(Cli, FigureIsDeterministicForFixedSeed) {
  TempDir a, b;
  const std::vector<std::string> common = {"--trials", "1000", "--seed", "11", "--override", "N=8", "--override", "K=12"};
  auto args = [&](const TempDir& d) {
    std::vector<std::string> v = {"figure", "fa_mvdr", "--out", d.path().string()};
    v.insert(v.end(), common.begin(), common.end());
    return v;
  };
  ASSERT_EQ(cli(args(a)).code, kExitOk);
  ASSERT_EQ(cli(args(b)).code, kExitOk);
  EXPECT_EQ(read_text(a.path() / "fa_mvdr_K12.csv"), read_text(b.path() / "fa_mvdr_K12.csv"));
}

TEST(Cli, ExperimentIsReproducibleAndSeedable) {
  TempDir d;
  const fs::path cfg = d.path() / "cfg.json";
  write_config(cfg, 4, 8);
  const fs::path o1 = d.path() / "one", o2 = d.path() / "two", o3 = d.path() / "three";
  ASSERT_EQ(cli({"experiment", cfg.string(), "--out", o1.string(), "--seed", "7"}).code, kExitOk);
  ASSERT_EQ(cli({"experiment", cfg.string(), "--out", o2.string(), "--seed", "7", "--threads", "3"}).code, kExitOk);
  ASSERT_EQ(cli({"experiment", cfg.string(), "--out", o3.string(), "--seed", "8"}).code, kExitOk);
  EXPECT_EQ(without_runtime(o1 / "result.json"), without_runtime(o2 / "result.json"));
  EXPECT_NE(without_runtime(o1 / "result.json"), without_runtime(o3 / "result.json"));
  EXPECT_EQ(read_text(o1 / "samples.csv"), read_text(o2 / "samples.csv"));
  const json side = json::parse(read_text(o1 / "samples.json"));
  EXPECT_EQ(side["seed"], 7);
  EXPECT_EQ(side["config"]["K"], 8);
  EXPECT_EQ(parse_csv(read_text(o1 / "samples.csv")).rows.size(), 500u);
}

TEST(Cli, ExperimentOverridesAndConfigErrors) {
  TempDir d;
  const fs::path cfg = d.path() / "cfg.json";
  write_config(cfg, 4, 8);
  const fs::path o = d.path() / "o";
  ASSERT_EQ(cli({"experiment", cfg.string(), "--out", o.string(), "--trials", "200", "--override", "K=6",
                 "--override", "ks_targets.0.K=6"}).code,
            kExitOk);
  const json r = json::parse(read_text(o / "result.json"));
  EXPECT_EQ(r["trials"], 200);
  EXPECT_EQ(r["config"]["K"], 6);
  // KS target left at K=8 while the data use K=6
  EXPECT_EQ(cli({"experiment", cfg.string(), "--out", o.string(), "--trials", "2000", "--override", "K=6"}).code,
            kExitFailure);
  // K < N under SMI
  const CliRun bad = cli({"experiment", cfg.string(), "--out", o.string(), "--override", "K=3"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("K"), std::string::npos);
  write_text(d.path() / "broken.json", "{\"trials\": ");
  EXPECT_EQ(cli({"experiment", (d.path() / "broken.json").string(), "--out", o.string()}).code, kExitUsage);
  EXPECT_EQ(cli({"experiment", (d.path() / "missing.json").string(), "--out", o.string()}).code, kExitUsage);
}

TEST(Cli, EnvironmentSeedIsDefault) {
  EnvGuard guard("SNRLOSS_SEED");
  setenv("SNRLOSS_SEED", "4242", 1);
  EXPECT_EQ(resolve_seed(std::nullopt, 1), 4242u);
  EXPECT_EQ(resolve_seed(9, 1), 9u);
  TempDir d;
  const fs::path cfg = d.path() / "cfg.json";
  write_config(cfg, 4, 8);
  ASSERT_EQ(cli({"experiment", cfg.string(), "--out", (d.path() / "e").string()}).code, kExitOk);
  EXPECT_EQ(json::parse(read_text(d.path() / "e" / "result.json"))["config"]["seed"], 4242);
  setenv("SNRLOSS_SEED", "not-a-number", 1);
  EXPECT_THROW(resolve_seed(std::nullopt, 1), snrloss::Error);
  EXPECT_EQ(cli({"experiment", cfg.string(), "--out", (d.path() / "f").string()}).code, kExitUsage);
  unsetenv("SNRLOSS_SEED");
  EXPECT_EQ(resolve_seed(std::nullopt, 77), 77u);
}

TEST(Cli, PdfGridMatchesLaw) {
  TempDir d;
  const CliRun r = cli({"pdf", "mvdr", "--points", "11", "--out", d.path().string(), "--override", "N=2", "--override", "K=3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const CsvTable t = parse_csv(read_text(d.path() / "pdf_mvdr.csv"));
  ASSERT_EQ(t.header, (std::vector<std::string>{"rho", "pdf", "cdf"}));
  ASSERT_EQ(t.rows.size(), 11u);
  // N=2, K=3: Beta(3, 1) density 3 rho^2, cdf rho^3.
  for (const auto& row : t.rows) {
    const double rho = std::stod(row[0]);
    EXPECT_NEAR(std::stod(row[1]), 3 * rho * rho, 1e-12);
    EXPECT_NEAR(std::stod(row[2]), rho * rho * rho, 1e-12);
  }
  const json side = json::parse(read_text(d.path() / "pdf_mvdr.json"));
  EXPECT_EQ(side["law"]["K"], 3);
  EXPECT_EQ(side["version"], snrloss::kVersion);
  EXPECT_EQ(cli({"pdf", "mvdr", "--out", d.path().string(), "--override", "N=5", "--override", "K=3"}).code, kExitUsage);
  EXPECT_EQ(cli({"pdf", "mvdr", "--out", d.path().string(), "--override", "colour=3"}).code, kExitUsage);
}

TEST(Cli, QuickVerifyReportsEachCriterion) {
  const CliRun run = cli({"verify", "quick"});
  for (const char* id : {"A1", "A2", "A3", "A4", "A5"}) {
    EXPECT_NE(run.out.find(std::string("\n") + id + " "), std::string::npos) << id;
  }
  EXPECT_EQ(run.out.find("A6"), std::string::npos);
  const bool any_fail = run.out.find(" FAIL ") != std::string::npos;
  EXPECT_EQ(run.code, any_fail ? kExitFailure : kExitOk) << run.out;
  const std::vector<std::string> a14 = {"A1  PASS", "A2  PASS", "A3  PASS", "A4  PASS"};
  for (const auto& line : a14) EXPECT_NE(run.out.find(line), std::string::npos) << line;
}

TEST(Cli, TamperedBetaLawFailsVerify) {
  const CliRun bad = cli({"verify", "quick", "--tamper-beta"});
  EXPECT_EQ(bad.code, kExitFailure);
  EXPECT_NE(bad.out.find("A1  FAIL"), std::string::npos) << bad.out;
}

TEST(Cli, BinaryReportsExitCodes) {
  const std::string bin = SNRLOSS_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " > /dev/null 2>&1").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " verify quick --tamper-beta > /dev/null 2>&1").c_str())), 1);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " --version > /dev/null 2>&1").c_str())), 0);
}
