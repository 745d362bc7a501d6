#pragma once

#include <functional>
#include <string>
#include <vector>

namespace htlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// Measured values behind the verdict, or the exception text.
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

/// Title of criterion `id` (1-based).
std::string criterion_title(int id);

/// Runs one criterion; exceptions become a FAIL with the message as detail.
CriterionResult run_criterion(int id);

/// Runs the requested criteria (all when empty) in order, reporting each result as it completes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "criterion <id> <title>: PASS|FAIL (<detail>) [<seconds> s]"
std::string format_result(const CriterionResult& r);

}  // namespace htlab
