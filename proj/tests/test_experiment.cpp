#include <algorithm>
#include <atomic>
#include <cmath>

#include <gtest/gtest.h>

#include "snrloss/error.hpp"
#include "snrloss/experiment.hpp"
#include "snrloss/statistics.hpp"
#include "support/oracles.hpp"

using namespace snrloss;

namespace {

template <typename F>
ErrorCode code_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected snrloss::Error";
  return ErrorCode::kConfigError;
}

ExperimentConfig mvdr_config(int n, int k, int trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.scenario = make_mvdr(HermitianMatrix(oracle::reference_sigma(n)), oracle::steering(n, 0.0));
  c.k = k;
  c.trials = trials;
  c.seed = seed;
  if (k >= n) c.ks_targets = {LossLaw::mvdr(n, k)};
  return c;
}

void expect_same(const ExperimentResult& a, const ExperimentResult& b) {
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.histogram.counts, b.histogram.counts);
  EXPECT_EQ(a.moments.mean, b.moments.mean);
  EXPECT_EQ(a.moments.variance, b.moments.variance);
  ASSERT_EQ(a.ks_results.size(), b.ks_results.size());
  for (std::size_t i = 0; i < a.ks_results.size(); ++i) {
    EXPECT_EQ(a.ks_results[i].ks.statistic, b.ks_results[i].ks.statistic);
  }
}

}  // namespace

TEST(Ks, SingleSampleAtMedian) {
  const KsResult r = ks_distance({0.5}, [](double x) { return x; });
  EXPECT_DOUBLE_EQ(r.statistic, 0.5);
  EXPECT_DOUBLE_EQ(r.threshold_1pct, 1.63);
}

TEST(Ks, ConstantSamplesAreFarFromContinuousLaw) {
  const std::vector<double> x(500, 0.3);
  EXPECT_GE(ks_distance(x, [](double t) { return t; }).statistic, 0.5);
}

TEST(Ks, CalibratedAtOnePercent) {
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng rng(100, rep);
    std::vector<double> u(1000);
    for (double& x : u) x = rng.uniform();
    std::sort(u.begin(), u.end());
    const KsResult r = ks_distance(u, [](double t) { return t; });
    EXPECT_NEAR(r.statistic, oracle::ks(u, [](double t) { return t; }), 1e-15);
    passes += r.pass();
  }
  EXPECT_GE(passes, 95);
}

TEST(Ks, TwoSampleStatisticByHand) {
  const KsResult r = ks_two_sample({0.1, 0.2, 0.3}, {0.25, 0.35, 0.45, 0.55});
  // after 0.3: 1 - 1/4
  EXPECT_DOUBLE_EQ(r.statistic, 0.75);
  EXPECT_DOUBLE_EQ(r.threshold_1pct, 1.63 * std::sqrt(7.0 / 12.0));
  EXPECT_EQ(ks_two_sample({0.1, 0.2}, {0.1, 0.2}).statistic, 0.0);
}

TEST(Ks, EmptyInputRejected) {
  EXPECT_EQ(code_of([] { ks_distance({}, [](double t) { return t; }); }), ErrorCode::kEmptySamples);
  EXPECT_EQ(code_of([] { ks_two_sample({}, {0.5}); }), ErrorCode::kEmptySamples);
}

TEST(Histogram, BinsAndMerge) {
  Histogram h = make_histogram(4);
  for (double x : {0.0, 0.1, 0.25, 0.5, 0.99, 1.0}) h.add(x);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{2, 1, 1, 2}));
  EXPECT_EQ(h.total(), 6u);
  EXPECT_DOUBLE_EQ(h.left(1), 0.25);
  EXPECT_DOUBLE_EQ(h.right(3), 1.0);
  Histogram g = histogram_of({0.3, 0.8}, 4);
  h.merge(g);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{2, 2, 1, 3}));
}

TEST(Moments, MeanVarianceAndThinning) {
  const Moments m = moments_of({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(m.count, 4u);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.variance, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.std_error(), std::sqrt(5.0 / 12.0), 1e-15);
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto t = thin_sorted(x, 10);
  ASSERT_EQ(t.size(), 10u);
  EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
  EXPECT_EQ(thin_sorted({1.0, 2.0}, 10).size(), 2u);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrowsLowestFailure) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](std::uint64_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(1000, 3, [](std::uint64_t i) {
      if (i == 700 || i == 70) throw Error(ErrorCode::kSingular, "trial " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("trial 70"), std::string::npos);
  }
}

TEST(RunExperiment, MvdrPassesKs) {
  const ExperimentResult r = run_experiment(mvdr_config(8, 16, 10000, 1));
  ASSERT_EQ(r.ks_results.size(), 1u);
  EXPECT_TRUE(r.ks_results[0].ks.pass()) << r.ks_results[0].ks.statistic;
  EXPECT_FALSE(r.ks_results[0].empirical_cdf);
  EXPECT_EQ(r.trials, 10000u);
  EXPECT_EQ(r.histogram.total(), 10000u);
  EXPECT_FALSE(r.version.empty());
}

TEST(RunExperiment, MinimumTrialsWellFormed) {
  const ExperimentResult r = run_experiment(mvdr_config(4, 6, 100, 2));
  EXPECT_EQ(r.histogram.total(), 100u);
  EXPECT_EQ(r.samples.size(), 100u);
  EXPECT_EQ(r.histogram.counts.size(), 100u);
  EXPECT_TRUE(std::is_sorted(r.samples.begin(), r.samples.end()));
  for (double x : r.samples) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(RunExperiment, IndependentOfWorkerCount) {
  ExperimentConfig c = mvdr_config(6, 10, 2000, 3);
  c.threads = 1;
  const ExperimentResult a = run_experiment(c);
  c.threads = 4;
  const ExperimentResult b = run_experiment(c);
  c.threads = 7;
  const ExperimentResult d = run_experiment(c);
  expect_same(a, b);
  expect_same(a, d);
}

TEST(RunExperiment, RepeatRunsAreIdentical) {
  ExperimentConfig c = mvdr_config(6, 10, 500, 4);
  c.filter.kind = FilterKind::kMarzetta;
  c.filter.r = 2;
  c.filter.l = 3;
  c.ks_targets.clear();
  expect_same(run_experiment(c), run_experiment(c));
  c.seed = 5;
  EXPECT_NE(run_experiment(c).samples, run_experiment(mvdr_config(6, 10, 500, 4)).samples);
}

TEST(RunExperiment, PartialRangesMergeToSingleRun) {
  const ExperimentConfig c = mvdr_config(6, 10, 1000, 6);
  const ExperimentResult whole = run_experiment(c);
  const PartialResult a = run_partial(c, 0, 300);
  const PartialResult b = run_partial(c, 300, 650);
  const PartialResult d = run_partial(c, 650, 1000);
  expect_same(finalize(c, merge(merge(a, b), d)), whole);
  expect_same(finalize(c, merge(a, merge(b, d))), whole);
  expect_same(finalize(c, merge(d, merge(b, a))), whole);
}

TEST(RunExperiment, TrialUsesItsOwnStream) {
  const ExperimentConfig c = mvdr_config(5, 9, 100, 7);
  const TrainingSampler sampler(c.scenario);
  const PartialResult p = run_partial(c, 40, 41);
  EXPECT_EQ(p.losses.at(0), run_trial(c, sampler, {}, 40));
}

TEST(RunExperiment, EveryFilterKindRuns) {
  for (FilterKind kind : {FilterKind::kSmi, FilterKind::kPartial, FilterKind::kEigencanceler, FilterKind::kPchol,
                          FilterKind::kDiagonalLoading, FilterKind::kMarzetta}) {
    ExperimentConfig c = mvdr_config(8, 12, 200, 8);
    c.ks_targets.clear();
    c.filter.kind = kind;
    c.filter.r = 3;
    c.filter.mu = 1.0;
    c.filter.l = 2;
    const ExperimentResult r = run_experiment(c);
    EXPECT_EQ(r.histogram.total(), 200u) << to_string(kind);
    EXPECT_EQ(filter_kind_from_string(to_string(kind)), kind);
  }
}

TEST(RunExperiment, PartialFilterPsiIsSeededOnce) {
  ExperimentConfig c = mvdr_config(8, 8, 100, 9);
  c.filter.kind = FilterKind::kPartial;
  c.filter.r = 2;
  const ComplexMatrix psi = experiment_psi(c);
  EXPECT_EQ(psi.rows(), 7);
  EXPECT_EQ(psi.cols(), 2);
  EXPECT_EQ(psi, experiment_psi(c));
  const double a = coef_a(make_gsc_transform(c.scenario.v, psi), c.scenario.sigma, c.scenario.v);
  for (double x : run_experiment(c).samples) EXPECT_LE(x, a + 1e-9);
}

TEST(RunExperiment, InvalidConfigsNameTheConstraint) {
  auto message = [](const ExperimentConfig& c) {
    try {
      c.validate();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfigError);
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(mvdr_config(16, 8, 1000, 1)).find("K >= N"), std::string::npos);
  EXPECT_NE(message(mvdr_config(8, 16, 99, 1)).find("trials"), std::string::npos);
  ExperimentConfig c = mvdr_config(8, 16, 1000, 1);
  c.filter.kind = FilterKind::kPartial;
  c.filter.r = 8;
  EXPECT_NE(message(c).find("filter.r"), std::string::npos);
  EXPECT_EQ(code_of([] { filter_kind_from_string("fir"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { run_experiment(mvdr_config(16, 8, 1000, 1)); }), ErrorCode::kConfigError);
}

TEST(SampleLaw, DeterministicAcrossThreads) {
  const LossLaw law = LossLaw::student(8, 16, 16.0);
  EXPECT_EQ(sample_law(law, 3000, 10, 1), sample_law(law, 3000, 10, 5));
}

TEST(CompareRoutes, MvdrAllRoutesAgree) {
  const Scenario s = make_mvdr(HermitianMatrix(oracle::reference_sigma(8)), oracle::steering(8, 0.0));
  const RouteReport r = compare_routes(s, 16, 10000, 11);
  EXPECT_TRUE(r.pass());
  ASSERT_TRUE(r.direct_vs_closed_form.has_value());
  ASSERT_TRUE(r.representation_vs_closed_form.has_value());
  EXPECT_TRUE(r.direct_vs_closed_form->pass());
  EXPECT_TRUE(r.representation_vs_closed_form->pass());
  EXPECT_EQ(representation_seed(11), 11 ^ 0x9E3779B97F4A7C15ULL);
}

TEST(CompareRoutes, StrongSoiDepartsFromMvdrLaw) {
  const HermitianMatrix sigma(oracle::reference_sigma(16));
  const ComplexVector v = oracle::steering(16, 0.0);
  const double p = 100.0 / snr_opt(sigma, v, 1.0);
  const RouteReport r = compare_routes(make_mpdr(sigma, v, p), 32, 10000, 12);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.law.kind, LawKind::kMpdr);
  std::vector<double> direct = sample_law(r.law, 10000, 13);
  std::sort(direct.begin(), direct.end());
  const LossLaw mvdr = LossLaw::mvdr(16, 32);
  const KsResult vs_mvdr = ks_distance(direct, [&](double x) { return cdf_rho(x, mvdr); });
  EXPECT_GT(vs_mvdr.statistic, 10.0 * vs_mvdr.threshold_1pct);
}

TEST(CompareRoutes, EigencancelerNearApproximateLaw) {
  ExperimentConfig c = mvdr_config(16, 16, 5000, 14);
  c.filter.kind = FilterKind::kEigencanceler;
  c.filter.r = 3;
  c.ks_targets = {LossLaw::ec_approx(16, 3)};
  const ExperimentResult r = run_experiment(c);
  EXPECT_NEAR(r.moments.mean, LossLaw::ec_approx(16, 3).beta().mean(), 0.05);
}
