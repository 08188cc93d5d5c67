#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "snrloss/hermitian.hpp"

namespace snrloss::app {

inline constexpr std::uint64_t kDefaultSeed = 12345;

/// The three-interferer ULA scenario with broadside look direction.
struct ReferenceScenario {
  HermitianMatrix sigma;
  ComplexMatrix g;
  ComplexVector v;
};
ReferenceScenario reference_scenario(Eigen::Index n);

enum class VerifyLevel { kQuick, kFull };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::kQuick;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  /// Test hook: swaps the Beta parameters used as the MVDR reference.
  bool tamper_beta = false;
};

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// A1..A5 for quick, A1..A9 for full.
std::vector<std::string> criterion_ids(VerifyLevel level);
CriterionResult run_criterion(const std::string& id, const VerifyOptions& options);
std::vector<CriterionResult> run_verify(const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& on_result = {});
/// "A1  PASS  (1.2 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace snrloss::app
