#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgdamp {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct CheckOptions {
  /// Substring filter on check names; empty runs everything.
  std::string filter;
  /// Passed through to SchemeConfig::use_difference_quotient.
  bool use_difference_quotient = true;
};

std::vector<std::string> check_names();
std::vector<CheckResult> run_checks(const CheckOptions& opts);

/// Prints a pass/fail table; nonzero exit when any selected check fails.
int cmd_check(const CheckOptions& opts, std::ostream& out);

}  // namespace kgdamp
