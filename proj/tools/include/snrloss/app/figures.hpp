#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "snrloss/app/verify.hpp"

namespace snrloss::app {

/// key=value parameter overrides with typed lookup. Values are numbers or
/// comma-separated number lists.
class Overrides {
 public:
  Overrides() = default;
  explicit Overrides(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  /// Parses "key=value"; throws kConfigError on a missing '='.
  void add(const std::string& assignment);
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  /// Throws kConfigError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known, const std::string& context) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct FigureOptions {
  std::uint64_t seed = kDefaultSeed;
  int trials = 10000;
  int threads = 0;
  Overrides overrides;
};

std::vector<std::string> figure_ids();

/// Writes one CSV (plus sidecar JSON) per curve into `out_dir` and returns the
/// CSV paths. Density curves have columns rho, density, empirical_density,
/// representation_density; a column is left empty where its route does not
/// apply. Throws kUnknownFigure and kConfigError.
std::vector<std::filesystem::path> run_figure(const std::string& id, const FigureOptions& options,
                                              const std::filesystem::path& out_dir);

}  // namespace snrloss::app
