#pragma once

// Self-check suites behind `ncdist verify`. Each suite draws seeded random
// instances and compares independent computation paths.

#include <cstdint>
#include <string>
#include <vector>

namespace ncdist {

struct SuiteCheck {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteCheck> checks;
  bool passed() const;
};

/// algebra, calculus, ball, distance, probes, torus
const std::vector<std::string>& suite_names();

/// Throws ParameterError for an unknown suite.
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 20240607);

}  // namespace ncdist
