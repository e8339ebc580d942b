#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dgdtrack/experiment.hpp"

namespace dgdtrack {

enum class CheckStatus { pass, fail, skip };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool ok() const;
  std::string to_text() const;
};

struct ValidationOptions {
  // Applied to the mixing matrix after construction; used to inject faults.
  std::function<void(MixingMatrix&)> corrupt_mixing;
  int random_pairs = 100;
  int banach_iterations = 100000;
  std::uint64_t seed = 0x5EEDULL;
};

/// Runs the cross-module invariant suites against the configuration's
/// topology and one simulated run: mixing-matrix invariants, weight simplex
/// and recursion agreement, accumulator-vs-history equivalence, DGD
/// contraction and affinity, fixed-point solve quality and Banach agreement,
/// minimizer/fixed-point boundedness, bias and drift certification,
/// summation envelopes, and tracking-bound domination.
ValidationReport run_validation(const ExperimentConfig& cfg, const ValidationOptions& options = {});

}  // namespace dgdtrack
