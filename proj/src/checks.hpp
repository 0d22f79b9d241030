// The full verification battery over the reference measure: geometry,
// exactness anchors, duality and mass identities, Monte-Carlo/grid
// cross-validation, the dimension-formula desk check, the Fourier-side
// suite, estimator calibration, and determinism. Each check prints one
// line and carries its measured value and threshold.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace projlab {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string details;
};

struct CheckOptions {
  uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

std::vector<CheckResult> run_acceptance_checks(const CheckOptions& opts);

// Single named check (ids 1..16); runs everything when id == 0.
std::vector<CheckResult> run_acceptance_checks(const CheckOptions& opts, int only_id);

std::string format_check_line(const CheckResult& r);

}  // namespace projlab
