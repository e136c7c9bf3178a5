#pragma once

#include <string>
#include <vector>

#include "fracest/mc.hpp"

namespace fracest {

struct SelftestCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Cheap closed-form checks; one flag per case in the report, plus
/// scalars passed / failed.
std::vector<SelftestCase> run_selftest();
McReport selftest_report();

}  // namespace fracest
