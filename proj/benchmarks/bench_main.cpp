#include <benchmark/benchmark.h>

#include "snrloss/distributions.hpp"
#include "snrloss/experiment.hpp"
#include "snrloss/filters.hpp"
#include "snrloss/loss_law.hpp"
#include "snrloss/scenario.hpp"

using namespace snrloss;

namespace {

void BM_Wishart(benchmark::State& state) {
  const auto n = state.range(0);
  const HermitianMatrix sigma = HermitianMatrix::identity(n);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_wishart(rng, n, 2 * n, sigma));
}
BENCHMARK(BM_Wishart)->Arg(8)->Arg(16)->Arg(64);

void BM_Smi(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(2);
  const HermitianMatrix st = sample_wishart(rng, n, 2 * n, HermitianMatrix::identity(n));
  const ComplexVector v = ula_steering(static_cast<int>(n), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(w_smi(st, v));
}
BENCHMARK(BM_Smi)->Arg(8)->Arg(16)->Arg(64);

void BM_SampleRho(benchmark::State& state) {
  const LossLaw law = LossLaw::mvdr(16, 32);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_rho(rng, law));
}
BENCHMARK(BM_SampleRho);

void BM_StudentPdf(benchmark::State& state) {
  const LossLaw law = LossLaw::student(16, 32, static_cast<double>(state.range(0)));
  double rho = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdf_rho(rho, law));
    rho = rho > 0.9 ? 0.1 : rho + 0.01;
  }
}
BENCHMARK(BM_StudentPdf)->Arg(20)->Arg(256);

void BM_StudentCdf(benchmark::State& state) {
  const LossLaw law = LossLaw::student(16, 32, 32.0);
  for (auto _ : state) benchmark::DoNotOptimize(cdf_rho(0.5, law));
}
BENCHMARK(BM_StudentCdf);

void BM_Experiment(benchmark::State& state) {
  ExperimentConfig c;
  const auto [sigma, g] = build_sigma(16, reference_interferers());
  c.scenario = make_mvdr(sigma, ula_steering(16, 0.0));
  c.k = 32;
  c.trials = static_cast<int>(state.range(0));
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Experiment)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
