#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace borelsum::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string threshold;
  double seconds = 0.0;
};

struct Options {
  /// Multiplies every error tolerance and tolerance band; fixed ratios (refinement gain,
  /// Lipschitz scaling, remainder order) are not scaled.
  double tolerance_scale = 1.0;
  std::vector<int> only;  // empty: all criteria
  std::function<void(const CriterionResult&)> on_result;
};

constexpr int kCriteria = 11;

const std::string& criterion_name(int id);
CriterionResult run_criterion(int id, const Options& opt = {});
std::vector<CriterionResult> run(const Options& opt = {});

/// "PASS  3  exact invariance  measured | threshold  (1.2 s)"
std::string format_line(const CriterionResult& r);
void write_json(const std::vector<CriterionResult>& results, std::ostream& os);

}  // namespace borelsum::acceptance
