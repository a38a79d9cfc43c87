#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  bool quick = false;       // fewer traced branch points in criterion 6
  std::vector<int> only;    // empty runs all criteria
  std::ostream* log = nullptr;
};

std::vector<CriterionResult> run(const Options& opt);

// "[PASS] 3 adjoint identity: ..." style line.
std::string format(const CriterionResult& r);

}  // namespace acceptance
