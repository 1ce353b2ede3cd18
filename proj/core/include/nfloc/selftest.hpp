#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nfloc {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick randomized property checks over the library (a few seconds).
std::vector<SelftestCheck> run_selftest(std::uint64_t seed);

}  // namespace nfloc
