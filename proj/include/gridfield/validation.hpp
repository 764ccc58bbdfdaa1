#pragma once

// Self-check suites comparing the structured closed forms against dense
// reference computations, with overridable tolerances and a mutation hook
// used to confirm the checks actually bite.

#include <map>
#include <string>
#include <vector>

namespace gridfield {

struct ValidationOptions {
  // keyed by check name; overrides the built-in tolerance
  std::map<std::string, double> tol_overrides;
  // test hook: flips the sign of one structured inverse entry before
  // comparison, which must make the inverse check fail
  bool inject_sign_flip = false;
  std::vector<int> sizes = {6, 8, 12, 16};
  std::vector<double> thetas = {0.5, 1.0, 2.0};
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst observed discrepancy
  double tol = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string to_text() const;  // one line per check plus a summary
};

ValidationReport run_validation(const ValidationOptions& opts = {});

}  // namespace gridfield
