#pragma once

#include <string>
#include <vector>

namespace vague {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

/// The full acceptance suite, one entry per criterion; deterministic.
std::vector<CriterionResult> run_acceptance();

/// Prints one "PASS/FAIL criterion-N name (detail)" line per entry; returns
/// true iff all passed.
bool print_acceptance(const std::vector<CriterionResult>& results);

}  // namespace vague
