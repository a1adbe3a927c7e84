#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csd {

struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SelfCheckOptions {
  /// Fault injection: flip the sign of the phi''/phi' term in Archimedean scores.
  bool inject_generator_sign_flip = false;
  std::uint64_t seed = 20240601;
};

/// Score vs finite differences, Stein kernel vs brute force, streaming vs naive,
/// random-feature unbiasedness smoke test.
std::vector<CheckResult> run_self_check(const SelfCheckOptions& options = {});

}  // namespace csd
