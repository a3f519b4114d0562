#pragma once

#include <cstdint>
#include <iosfwd>

namespace symdecomp {

struct SelftestConfig {
  std::uint64_t seed = 1;
  int n_max = 8;
  int trials = 12; // per property
};

// Runs the randomized property suite, printing one "name = pass/fail" line
// per property. Returns true when every property holds.
bool run_selftest(const SelftestConfig& cfg, std::ostream& out);

} // namespace symdecomp
