#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uot {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Oracle cross-checks on small seeded instances.
std::vector<CheckResult> run_oracle_checks(std::uint64_t seed);

}  // namespace uot
