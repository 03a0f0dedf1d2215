#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nmr {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runtime invariant suite used by `newton_mr_bench check`: problem
/// derivative self-tests, operator symmetry, MINRES residual/curvature
/// identities on random symmetric systems, linesearch post-conditions and
/// monotone descent of short solver runs.
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed = 0);

}  // namespace nmr
