#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "snrloss/distributions.hpp"
#include "snrloss/error.hpp"
#include "snrloss/loss_law.hpp"
#include "snrloss/scenario.hpp"
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

// Angle between two complex vectors, ignoring phase.
double angle_between(const ComplexVector& a, const ComplexVector& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

HermitianMatrix reference_sigma(int n) { return HermitianMatrix(oracle::reference_sigma(n)); }

}  // namespace

TEST(Steering, BroadsideIsAllOnes) {
  const ComplexVector v = ula_steering(8, 0.0);
  EXPECT_LT((v - ComplexVector::Ones(8)).norm(), 1e-15);
}

TEST(Steering, ThirtyDegreesTwoElements) {
  const ComplexVector v = ula_steering(2, 30.0);
  EXPECT_LT(std::abs(v(0) - Complex(1.0, 0.0)), 1e-15);
  EXPECT_LT(std::abs(v(1) - Complex(0.0, 1.0)), 1e-15);
}

TEST(Steering, UnitModulusEntriesAndOracleAgreement) {
  for (double deg : {-75.0, -12.0, 9.0, 25.0, 40.0, 89.0}) {
    const ComplexVector v = ula_steering(16, deg);
    EXPECT_NEAR(v.squaredNorm(), 16.0, 1e-12);
    EXPECT_LT((v - oracle::steering(16, deg)).norm(), 1e-12);
  }
}

TEST(Steering, EndfireAndBeyondRejected) {
  EXPECT_EQ(code_of([] { ula_steering(4, 90.0); }), ErrorCode::kBadAngle);
  EXPECT_EQ(code_of([] { ula_steering(4, -120.0); }), ErrorCode::kBadAngle);
}

TEST(BuildSigma, NoInterferersGivesScaledIdentity) {
  EXPECT_LT((build_sigma(5, {}).sigma.matrix() - ComplexMatrix::Identity(5, 5)).norm(), 1e-15);
  EXPECT_LT((build_sigma(5, {}, 2.5).sigma.matrix() - 2.5 * ComplexMatrix::Identity(5, 5)).norm(), 1e-15);
}

TEST(BuildSigma, ReferenceScenarioStructure) {
  const SigmaBuild b = build_sigma(16, reference_interferers());
  EXPECT_LT((b.sigma.matrix() - oracle::reference_sigma(16)).norm() / b.sigma.matrix().norm(), 1e-12);
  const HermitianMatrix ggh = HermitianMatrix::from_product(b.g * b.g.adjoint());
  const RealVector ev = eigh(ggh).values;
  EXPECT_GT(ev(2), 1.0);
  EXPECT_LT(ev(3), 1e-8 * ev(0));
  const RealVector sv = eigh(b.sigma).values;
  EXPECT_NEAR(sv(3), 1.0, 1e-9);
  EXPECT_NEAR(sv(15), 1.0, 1e-9);
}

TEST(BuildSigma, SingleInterfererLargestEigenvalue) {
  for (double p : {0.0, 10.0, 27.0}) {
    const SigmaBuild b = build_sigma(12, {{17.0, p}});
    const double lmax = eigh(HermitianMatrix::from_product(b.g * b.g.adjoint())).values(0);
    EXPECT_NEAR(lmax / (12.0 * std::pow(10.0, p / 10.0)), 1.0, 1e-12);
  }
}

TEST(BuildSigma, PermutationInvariant) {
  std::vector<Interferer> a = reference_interferers();
  std::vector<Interferer> b = {a[2], a[0], a[1]};
  EXPECT_LT((build_sigma(16, a).sigma.matrix() - build_sigma(16, b).sigma.matrix()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SimpleScenarios, CovarianceRelations) {
  const HermitianMatrix sigma = reference_sigma(8);
  const ComplexVector v = oracle::steering(8, 0.0);
  EXPECT_EQ(make_mvdr(sigma, v).ct.matrix(), sigma.matrix());
  EXPECT_LT((make_homog(sigma, v, 3.0).ct.matrix() - 3.0 * sigma.matrix()).norm(), 1e-12 * sigma.matrix().norm());
  EXPECT_EQ(make_mpdr(sigma, v, 0.0, 2.0).ct.matrix(), make_homog(sigma, v, 2.0).ct.matrix());
  EXPECT_EQ(make_mpdr(sigma, v, 1.0).kind, ScenarioKind::kMpdr);
}

TEST(SimpleScenarios, MpdrShermanMorrison) {
  const HermitianMatrix sigma = reference_sigma(8);
  const ComplexVector v = oracle::steering(8, 5.0);
  const double p = 4.0;
  const double gamma = 1.7;
  const Scenario s = make_mpdr(sigma, v, p, gamma);
  const double lhs = v.dot(oracle::inverse(s.ct.matrix()) * v).real();
  const double a = v.dot(oracle::inverse(sigma.matrix()) * v).real();
  const double rhs = (a / gamma) / (1.0 + p / gamma * a);
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-9);
}

TEST(Surprise, ObliqueOrthogonality) {
  const HermitianMatrix ct = reference_sigma(16);
  const ComplexVector v = oracle::steering(16, 0.0);
  for (double deg : {-40.0, 3.0, 40.0, 60.0}) {
    const Scenario s = make_surprise(ct, v, deg, 10.0);
    const ComplexVector civ = oracle::inverse(ct.matrix()) * v;
    EXPECT_LT(std::abs(s.extras.q.dot(civ)), 1e-10 * s.extras.q.norm() * civ.norm());
    EXPECT_NEAR(s.extras.q.squaredNorm(), 16.0 * 10.0, 1e-9);
    EXPECT_LT((s.sigma.matrix() - ct.matrix() - s.extras.q * s.extras.q.adjoint()).norm(), 1e-9 * s.sigma.matrix().norm());
  }
}

TEST(Surprise, SatisfiesGeneralizedEigenRelation) {
  const HermitianMatrix ct = reference_sigma(16);
  const ComplexVector v = oracle::steering(16, 0.0);
  const Scenario s = make_surprise(ct, v, 40.0, 20.0);
  const ComplexVector a = oracle::inverse(s.ct.matrix()) * v;
  const ComplexVector b = oracle::inverse(s.sigma.matrix()) * v;
  EXPECT_LT(angle_between(a, b), 1e-9);
}

TEST(Surprise, MetricVariantHitsTarget) {
  const HermitianMatrix ct = reference_sigma(16);
  const ComplexVector v = oracle::steering(16, 0.0);
  const Scenario s = make_surprise_metric(ct, v, 40.0, 10.0);
  const double m = s.extras.q.dot(oracle::inverse(ct.matrix()) * s.extras.q).real();
  EXPECT_NEAR(m, 10.0, 1e-8);
  EXPECT_NEAR(s.extras.q_metric, 10.0, 1e-8);
}

TEST(Surprise, VanishingPowerReducesToMvdr) {
  const HermitianMatrix ct = reference_sigma(8);
  const ComplexVector v = oracle::steering(8, 0.0);
  const Scenario s = make_surprise(ct, v, 40.0, -200.0);
  EXPECT_LT((s.sigma.matrix() - ct.matrix()).norm() / ct.matrix().norm(), 1e-15);
}

TEST(Surprise, DirectionAlongVIsDegenerate) {
  const ComplexVector v = oracle::steering(6, 20.0);
  EXPECT_EQ(code_of([&] { make_surprise(HermitianMatrix::identity(6), v, 20.0, 10.0); }), ErrorCode::kDegenerateQ);
}

TEST(Ger, ZeroStrengthIsMvdr) {
  Rng rng(1);
  const HermitianMatrix sigma = reference_sigma(8);
  const Scenario s = make_ger(sigma, oracle::steering(8, 0.0), rng, 0.0);
  EXPECT_EQ(s.ct.matrix(), sigma.matrix());
  EXPECT_NEAR(s.extras.lambda, 1.0, 1e-12);
  for (double l : s.extras.omega_eigs) EXPECT_NEAR(l, 1.0, 1e-9);
}

TEST(Ger, ParallelInverseImagesAndRealMismatch) {
  const HermitianMatrix sigma = reference_sigma(16);
  const ComplexVector v = oracle::steering(16, 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Scenario s = make_ger(sigma, v, rng, 3.0);
    const ComplexVector a = oracle::inverse(s.ct.matrix()) * v;
    const ComplexVector b = oracle::inverse(s.sigma.matrix()) * v;
    EXPECT_LT(angle_between(a, b), 1e-8);
    EXPECT_NEAR(a.norm() / b.norm(), 1.0, 1e-8);  // lambda = 1
    EXPECT_GT((s.ct.matrix() - s.sigma.matrix()).norm(), 1.0);
    EXPECT_GT(eigh(s.ct).values.minCoeff(), 0.0);
    // Omega_21 vanishes in the basis aligned with v
    const GeneralRepParams p = derive_general_params(s.sigma, s.ct, v);
    for (Eigen::Index i = 0; i < p.deltas.size(); ++i) EXPECT_LT(p.deltas(i), 1e-12);
    EXPECT_NEAR(p.ratio, 1.0, 1e-9);
  }
}

TEST(WishartMismatch, LargeDofConcentratesOnSigma) {
  Rng rng(2);
  const HermitianMatrix sigma = reference_sigma(4);
  const Scenario s = make_wishart_mismatch(sigma, oracle::steering(4, 0.0), rng, 0.0, 0.0, 4e4);
  EXPECT_LT((s.ct.matrix() - sigma.matrix()).norm() / sigma.matrix().norm(), 0.1);
  EXPECT_DOUBLE_EQ(s.extras.eta, 1.0);
}

TEST(WishartMismatch, DoublingEtaHalvesCovariance) {
  const HermitianMatrix sigma = HermitianMatrix::identity(4);
  const ComplexVector v = oracle::steering(4, 0.0);
  const double db2 = 10.0 * std::log10(2.0);
  Rng r1(3);
  Rng r2(4);
  double t1 = 0.0;
  double t2 = 0.0;
  for (int i = 0; i < 4000; ++i) {
    t1 += make_wishart_mismatch(sigma, v, r1, 0.0, 0.0, 16.0).ct.matrix().trace().real();
    t2 += make_wishart_mismatch(sigma, v, r2, db2, db2, 16.0).ct.matrix().trace().real();
  }
  EXPECT_NEAR(t1 / t2, 2.0, 0.1);
}

TEST(WishartMismatch, DefaultsAndErrors) {
  Rng rng(5);
  const HermitianMatrix sigma = reference_sigma(6);
  const ComplexVector v = oracle::steering(6, 0.0);
  const Scenario s = make_wishart_mismatch(sigma, v, rng);
  EXPECT_EQ(s.extras.dof, 12.0);
  EXPECT_GE(10.0 * std::log10(s.extras.eta), -6.0);
  EXPECT_LE(10.0 * std::log10(s.extras.eta), 6.0);
  EXPECT_EQ(code_of([&] { make_wishart_mismatch(sigma, v, rng, -6, 6, 5.0); }), ErrorCode::kInsufficientDoF);
}

TEST(Student, DefaultScaleAndErrors) {
  const HermitianMatrix sigma = reference_sigma(16);
  const ComplexVector v = oracle::steering(16, 0.0);
  const Scenario s = make_student(sigma, v, 32.0);
  EXPECT_EQ(s.extras.mu, 16.0);
  EXPECT_EQ(s.extras.nu, 32.0);
  EXPECT_EQ(make_student(sigma, v, 32.0, 3.0).extras.mu, 3.0);
  EXPECT_EQ(code_of([&] { make_student(sigma, v, 16.0); }), ErrorCode::kBadParam);
}

TEST(Student, TrainingCovarianceAveragesToSigma) {
  const HermitianMatrix sigma = reference_sigma(16);
  const Scenario s = make_student(sigma, oracle::steering(16, 0.0), 32.0);
  const TrainingSampler sampler(s);
  ComplexMatrix acc = ComplexMatrix::Zero(16, 16);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng(6, i);
    acc += sampler.draw_covariance(rng, 32).matrix() / 32.0;
  }
  acc /= 1000.0;
  EXPECT_LT((acc - sigma.matrix()).norm() / sigma.matrix().norm(), 0.05);
}

TEST(TrainingSet, GaussianCovarianceAndShape) {
  Rng init(7);
  const HermitianMatrix sigma(oracle::random_pd(init, 4));
  const Scenario s = make_mvdr(sigma, oracle::steering(4, 0.0));
  Rng rng(8);
  const ComplexMatrix x = draw_training_set(rng, s, 40000);
  ASSERT_EQ(x.rows(), 4);
  ASSERT_EQ(x.cols(), 40000);
  const ComplexMatrix c = x * x.adjoint() / 40000.0;
  EXPECT_LT((c - sigma.matrix()).norm() / sigma.matrix().norm(), 0.03);
}

TEST(TrainingSet, StrongSoiDominatesSampleCovariance) {
  const ComplexVector v = oracle::steering(8, 30.0);
  const Scenario s = make_mpdr(HermitianMatrix::identity(8), v, 1e4);
  Rng rng(9);
  const ComplexMatrix x = draw_training_set(rng, s, 64);
  const EigenDecomp e = eigh(HermitianMatrix::from_product(x * x.adjoint()));
  EXPECT_LT(angle_between(e.vectors.col(0), v), 0.05);
}

TEST(TrainingSet, SameStreamSameDraw) {
  const Scenario s = make_mvdr(reference_sigma(5), oracle::steering(5, 0.0));
  Rng a(10, 3);
  Rng b(10, 3);
  EXPECT_EQ(draw_training_set(a, s, 7), draw_training_set(b, s, 7));
  Rng c(10, 3);
  EXPECT_EQ(code_of([&] { draw_training_set(c, s, 0); }), ErrorCode::kBadParam);
}

TEST(ScenarioKind, NamesRoundTrip) {
  for (ScenarioKind k : {ScenarioKind::kMvdr, ScenarioKind::kHomog, ScenarioKind::kMpdr, ScenarioKind::kGer,
                         ScenarioKind::kSurprise, ScenarioKind::kWishartMismatch, ScenarioKind::kStudent}) {
    EXPECT_EQ(scenario_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(code_of([] { scenario_kind_from_string("nope"); }), ErrorCode::kBadParam);
}
