#pragma once

#include <string>
#include <vector>

namespace chl {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The fast property suite behind `chl verify`: every module invariant at
/// smoke scale (deterministic identities bitwise, numerical oracles at small
/// n, statistical properties at reduced sample counts). Completes in well
/// under ten minutes on a small desktop; the full-scale statistical
/// reproductions live in the acceptance suite.
std::vector<CheckResult> run_verification_suite();

}  // namespace chl
