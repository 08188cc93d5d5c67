// Acceptance suite: one PASS/FAIL line per criterion at the full level.
// Usage: acceptance [ID...] (default: all of A1..A9).

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "snrloss/app/verify.hpp"

int main(int argc, char** argv) {
  using namespace snrloss::app;
  VerifyOptions options;
  options.level = VerifyLevel::kFull;
  if (const char* env = std::getenv("SNRLOSS_SEED"); env != nullptr && *env != '\0') {
    options.seed = std::strtoull(env, nullptr, 10);
  }
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty()) ids = criterion_ids(VerifyLevel::kFull);

  int failed = 0;
  for (const std::string& id : ids) {
    const CriterionResult r = run_criterion(id, options);
    std::cout << format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
