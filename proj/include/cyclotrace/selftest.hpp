#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cyclotrace::selftest {

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success, else a reason
};

/// Invariants of every module at reduced size; a few seconds in total.
std::vector<Check> invariant_suite();

}  // namespace cyclotrace::selftest
