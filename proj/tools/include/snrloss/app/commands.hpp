#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace snrloss::app {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int threads = 0;
  std::filesystem::path out;
  std::vector<std::string> overrides;
};

/// --seed wins, then SNRLOSS_SEED, then `fallback`. Throws kConfigError when the
/// environment value is not an unsigned integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback);

int cmd_figure(const std::string& id, const CommonOptions& o, std::ostream& out);
/// Dotted overrides ("filter.kind=eigencanceler") are applied to the JSON
/// document before it is parsed.
int cmd_experiment(const std::filesystem::path& config, const CommonOptions& o, std::ostream& out);
int cmd_pdf(const std::string& kind, int points, const CommonOptions& o, std::ostream& out);
int cmd_verify(const std::string& level, bool tamper_beta, const CommonOptions& o, std::ostream& out);

/// Full command line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snrloss::app
