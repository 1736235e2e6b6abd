#pragma once

// Invariant suite behind the `verify` subcommand: quick property checks for
// every module, reported as a pass/fail table.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dmv/ensemble_ym.hpp"

namespace dmv {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// |m|^2 / (2 rho) + P(rho); convex in (rho, m).
Observable energy_observable(const PressureLaw& law);
/// Minus the energy; concave, so the Jensen check must reject it.
Observable negated_energy_observable(const PressureLaw& law);

struct VerifyOptions {
  PressureLaw law{1.0, 2.0, 0.0, 6.0};
  /// Observable for the Jensen check; the energy when empty.
  std::optional<Observable> jensen;
  /// Optional snapshot to load; a load failure fails the suite.
  std::optional<std::filesystem::path> snapshot;
  std::uint64_t seed = 0;
};

/// Jensen inequality F(<nu>) <= <nu; F> on at least `measures` random
/// two-atom measures (one per cell of a 1D grid); returns the violation count.
Index jensen_violations(const Observable& F, int measures, std::uint64_t seed);

std::vector<CheckResult> run_invariant_suite(const VerifyOptions& opt);

std::string format_check_table(const std::vector<CheckResult>& results);

}  // namespace dmv
