#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sscn::harness {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// subproblem, concentration, gradcheck, lemma1.
const std::vector<std::string>& suite_names();

/// Empty for an unknown suite name.
std::optional<SuiteReport> run_suite(std::string_view name);

void write_report(std::ostream& out, const SuiteReport& report);

}  // namespace sscn::harness
