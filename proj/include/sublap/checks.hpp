#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sublap {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckOptions {
  /// Suite names to run; empty runs all of them.
  std::vector<std::string> suites;
  std::uint64_t seed = 20240601;
  int workers = 0;
  /// Negative control: flips the sign of chi inside the operator checks.
  bool mutate_chi_sign = false;
};

/// core-geometry, geodesics, operators, volumes, compatibility, randomwalk.
const std::vector<std::string>& check_suites();

/// Runs the invariant suites. Throws Input on an unknown suite name.
std::vector<CheckResult> run_checks(const CheckOptions& options);

}  // namespace sublap
