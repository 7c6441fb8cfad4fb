#pragma once

#include <string>
#include <vector>

namespace samg {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic one-line summary of what was measured
  double seconds = 0.0;
};

// The five ordered counterexample checks on the two builtin games.
std::vector<CheckResult> counterexample_checks();

// The twelve release-gate checks (exact values, oracles, solver behavior).
std::vector<CheckResult> acceptance_checks();

// Both lists back to back; `samg counterexamples` and the test gate run this.
std::vector<CheckResult> full_acceptance_suite();

}  // namespace samg
