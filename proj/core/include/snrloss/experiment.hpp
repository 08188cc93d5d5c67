#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snrloss/loss_law.hpp"
#include "snrloss/scenario.hpp"
#include "snrloss/statistics.hpp"

namespace snrloss {

enum class FilterKind { kSmi, kPartial, kEigencanceler, kPchol, kDiagonalLoading, kMarzetta };

std::string_view to_string(FilterKind kind) noexcept;
FilterKind filter_kind_from_string(std::string_view name);

struct FilterSpec {
  FilterKind kind = FilterKind::kSmi;
  int r = 0;        ///< rank for partial, eigencanceler, pchol, marzetta
  double mu = 0.0;  ///< diagonal loading level
  int l = 1;        ///< Marzetta average size
  /// Fixed (N-1) x R gsc block for the partial filter. When empty it is drawn
  /// once from the experiment seed.
  ComplexMatrix psi;

  bool needs_full_rank() const { return kind == FilterKind::kSmi; }
};

struct ExperimentConfig {
  Scenario scenario;
  FilterSpec filter;
  int trials = 1000;
  int k = 0;
  std::uint64_t seed = 0;
  int bins = 100;
  bool moments = true;
  std::vector<LossLaw> ks_targets;
  int threads = 0;  ///< 0 selects hardware concurrency; never affects results

  /// Throws kConfigError naming the violated constraint.
  void validate() const;
};

struct KsTargetResult {
  LossLaw law;
  KsResult ks;
  bool empirical_cdf = false;
};

struct ExperimentResult {
  std::vector<double> samples;  ///< sorted losses (thinned beyond 10^6)
  std::uint64_t trials = 0;
  Moments moments;
  Histogram histogram;
  std::vector<KsTargetResult> ks_results;
  double runtime_ms = 0.0;
  ExperimentConfig config;
  std::string version;
};

/// Losses of trials [first, last) before sorting; one per trial.
struct PartialResult {
  std::uint64_t first = 0;
  std::vector<double> losses;
  Histogram histogram;
};

/// Runs `body(i)` for i in [0, count) on `threads` workers (0 = hardware).
/// Exceptions are rethrown on the caller thread (lowest index first).
void parallel_for(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body);

/// The gsc block used by the partial filter (explicit psi or seeded draw).
ComplexMatrix experiment_psi(const ExperimentConfig& config);

/// Trial i uses Rng(seed, i): draw S_t, build the filter, evaluate the loss.
double run_trial(const ExperimentConfig& config, const TrainingSampler& sampler,
                 const ComplexMatrix& psi, std::uint64_t index);

PartialResult run_partial(const ExperimentConfig& config, std::uint64_t first, std::uint64_t last);
PartialResult merge(PartialResult a, PartialResult b);
ExperimentResult finalize(const ExperimentConfig& config, PartialResult partial);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Losses drawn from a law with streams Rng(seed, i).
std::vector<double> sample_law(const LossLaw& law, std::uint64_t count, std::uint64_t seed, int threads = 0);

struct RouteReport {
  LossLaw law;
  KsResult direct_vs_representation;
  std::optional<KsResult> direct_vs_closed_form;
  std::optional<KsResult> representation_vs_closed_form;
  Moments direct;
  Moments representation;

  bool pass() const;
};

/// SMI simulation versus law sampling versus closed-form cdf.
RouteReport compare_routes(const Scenario& scenario, int k, int trials, std::uint64_t seed, int threads = 0);

/// Seed for the representation route of compare_routes.
std::uint64_t representation_seed(std::uint64_t seed) noexcept;

}  // namespace snrloss
