#include "snrloss/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "snrloss/filters.hpp"
#include "snrloss/version.hpp"

namespace snrloss {

namespace {

constexpr std::pair<FilterKind, std::string_view> kFilterNames[] = {
    {FilterKind::kSmi, "smi"},
    {FilterKind::kPartial, "partial"},
    {FilterKind::kEigencanceler, "eigencanceler"},
    {FilterKind::kPchol, "pchol"},
    {FilterKind::kDiagonalLoading, "diagonal_loading"},
    {FilterKind::kMarzetta, "marzetta"},
};

constexpr std::size_t kMaxRetained = 1'000'000;
constexpr std::uint64_t kPsiStream = 0xFFFF'FFFF'FFFF'FFFFULL;

void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

}  // namespace

std::string_view to_string(FilterKind kind) noexcept {
  for (const auto& [k, name] : kFilterNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

FilterKind filter_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kFilterNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kConfigError, "filter.kind: unknown filter '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  const int n = static_cast<int>(scenario.dim());
  if (n < 2) config_error("scenario: N must be at least 2");
  if (trials < 100) config_error("trials: M must be >= 100");
  if (k < 1) config_error("K: must be >= 1");
  if (filter.needs_full_rank() && k < n) {
    config_error("K: SMI filter requires K >= N (K=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
  if (bins < 1) config_error("bins: must be positive");
  switch (filter.kind) {
    case FilterKind::kPartial:
    case FilterKind::kMarzetta:
      if (filter.r < 1 || filter.r >= n) config_error("filter.r: must lie in [1, N-1]");
      if (filter.r + 1 > k) config_error("K: reduced filter needs K >= R + 1");
      break;
    case FilterKind::kEigencanceler:
    case FilterKind::kPchol:
      if (filter.r < 0 || filter.r >= n) config_error("filter.r: must lie in [0, N-1]");
      break;
    case FilterKind::kDiagonalLoading:
      if (!(filter.mu >= 0.0)) config_error("filter.mu: must be nonnegative");
      if (filter.mu == 0.0 && k < n) config_error("K: unloaded filter requires K >= N");
      break;
    case FilterKind::kSmi: break;
  }
  if (filter.kind == FilterKind::kMarzetta && filter.l < 1) config_error("filter.l: must be >= 1");
  if (filter.kind == FilterKind::kPartial && filter.psi.size() != 0 &&
      (filter.psi.rows() != n - 1 || filter.psi.cols() != filter.r)) {
    config_error("filter.psi: must be (N-1) x R");
  }
}

void parallel_for(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;
  std::exception_ptr error;
  std::uint64_t error_index = count;
  constexpr std::uint64_t kChunk = 64;
  auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::uint64_t start = next.fetch_add(kChunk);
      if (start >= count) return;
      const std::uint64_t stop = std::min(count, start + kChunk);
      for (std::uint64_t i = start; i < stop; ++i) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          failed = true;
          return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ComplexMatrix experiment_psi(const ExperimentConfig& config) {
  if (config.filter.kind != FilterKind::kPartial) return {};
  if (config.filter.psi.size() != 0) return config.filter.psi;
  Rng rng(config.seed, kPsiStream);
  return rng.complex_normal_matrix(config.scenario.dim() - 1, config.filter.r);
}

double run_trial(const ExperimentConfig& config, const TrainingSampler& sampler, const ComplexMatrix& psi,
                 std::uint64_t index) {
  Rng rng(config.seed, index);
  const Scenario& s = config.scenario;
  const HermitianMatrix st = sampler.draw_covariance(rng, config.k);
  const FilterSpec& f = config.filter;
  Weight w;
  switch (f.kind) {
    case FilterKind::kSmi: w = w_smi(st, s.v); break;
    case FilterKind::kPartial: w = w_gsc(psi, st, s.v); break;
    case FilterKind::kEigencanceler: w = w_eigencanceler(st, s.v, f.r); break;
    case FilterKind::kPchol: w = w_pchol(st, s.v, f.r); break;
    case FilterKind::kDiagonalLoading: w = w_diagonal_loading(st, s.v, f.mu, config.k); break;
    case FilterKind::kMarzetta: w = w_marzetta(rng, st, s.v, f.r, f.l); break;
  }
  return snr_loss(w, s.v, s.sigma);
}

PartialResult run_partial(const ExperimentConfig& config, std::uint64_t first, std::uint64_t last) {
  PartialResult out;
  out.first = first;
  out.losses.assign(last - first, 0.0);
  const TrainingSampler sampler(config.scenario);
  const ComplexMatrix psi = experiment_psi(config);
  parallel_for(last - first, config.threads, [&](std::uint64_t j) {
    const std::uint64_t i = first + j;
    try {
      out.losses[j] = run_trial(config, sampler, psi, i);
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(i) + ": " + e.what());
    }
  });
  out.histogram = histogram_of(out.losses, static_cast<std::size_t>(config.bins));
  return out;
}

PartialResult merge(PartialResult a, PartialResult b) {
  if (b.first < a.first) std::swap(a, b);
  a.histogram.merge(b.histogram);
  a.losses.insert(a.losses.end(), b.losses.begin(), b.losses.end());
  return a;
}

ExperimentResult finalize(const ExperimentConfig& config, PartialResult partial) {
  ExperimentResult r;
  r.config = config;
  r.version = kVersion;
  r.trials = partial.losses.size();
  r.histogram = std::move(partial.histogram);
  std::vector<double> sorted = std::move(partial.losses);
  std::sort(sorted.begin(), sorted.end());
  r.moments = moments_of(sorted);
  for (const LossLaw& law : config.ks_targets) {
    KsTargetResult t;
    t.law = law;
    t.empirical_cdf = cdf_is_empirical(law);
    t.ks = ks_distance(sorted, [&law](double x) { return cdf_rho(x, law); });
    r.ks_results.push_back(std::move(t));
  }
  r.samples = thin_sorted(sorted, kMaxRetained);
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r = finalize(config, run_partial(config, 0, static_cast<std::uint64_t>(config.trials)));
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<double> sample_law(const LossLaw& law, std::uint64_t count, std::uint64_t seed, int threads) {
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::uint64_t i) {
    Rng rng(seed, i);
    out[i] = sample_rho(rng, law);
  });
  return out;
}

std::uint64_t representation_seed(std::uint64_t seed) noexcept { return seed ^ 0x9E37'79B9'7F4A'7C15ULL; }

bool RouteReport::pass() const {
  if (!direct_vs_representation.pass()) return false;
  if (direct_vs_closed_form && !direct_vs_closed_form->pass()) return false;
  if (representation_vs_closed_form && !representation_vs_closed_form->pass()) return false;
  return true;
}

RouteReport compare_routes(const Scenario& scenario, int k, int trials, std::uint64_t seed, int threads) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  cfg.k = k;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.validate();
  RouteReport rep;
  rep.law = law_for_scenario(scenario, k);
  PartialResult p = run_partial(cfg, 0, static_cast<std::uint64_t>(trials));
  std::vector<double> direct = std::move(p.losses);
  std::vector<double> rsamp = sample_law(rep.law, static_cast<std::uint64_t>(trials), representation_seed(seed), threads);
  std::sort(direct.begin(), direct.end());
  std::sort(rsamp.begin(), rsamp.end());
  rep.direct = moments_of(direct);
  rep.representation = moments_of(rsamp);
  rep.direct_vs_representation = ks_two_sample(direct, rsamp);
  if (rep.law.has_closed_form()) {
    const LossLaw& law = rep.law;
    auto cdf = [&law](double x) { return cdf_rho(x, law); };
    rep.direct_vs_closed_form = ks_distance(direct, cdf);
    rep.representation_vs_closed_form = ks_distance(rsamp, cdf);
  }
  return rep;
}

}  // namespace snrloss
