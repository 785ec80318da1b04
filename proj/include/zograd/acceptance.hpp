#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace zograd {

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  /// Replications for the high-precision Monte Carlo checks.
  std::uint64_t reps = 1'000'000;
  /// Replications per budget for the rate fits.
  std::uint64_t rate_reps = 100'000;
  unsigned workers = 0;
};

struct CriterionResult {
  int id;
  std::string title;
  bool passed;
  /// Deterministic summary of the measured quantities.
  std::string detail;
};

/// Runs every acceptance criterion in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// One "[PASS]" / "[FAIL]" line per criterion plus a summary line. Returns
/// true when every criterion passed.
bool print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace zograd
