#pragma once

// Ensemble driver. Members are organised as paths x replicas: replicas of a
// path share its Wiener process, so their empirical measure is the measure
// for that realization and its spread is the oscillation defect.

#include <cstdint>
#include <functional>
#include <vector>

#include "dmv/energy_ledger.hpp"

namespace dmv {

struct EnsembleSpec {
  ModelConfig model;
  StepperConfig stepper;  // dt must be set
  Grid grid{std::vector<int>{16}};
  int paths = 1;
  int replicas = 1;
  std::uint64_t seed = 0;
  /// Wiener aggregation; see WienerPath.
  int aggregation = 1;
  double horizon = 1.0;
  /// Ledger rows every this many steps, plus t = 0 and the final time.
  int sample_every = 1;
  std::function<State(const Grid&, int path, int replica)> initial;
  int threads = 0;
  /// Optional hook at every sample time; runs on worker threads.
  std::function<void(int path, std::uint64_t step, const std::vector<State>& replicas)> on_sample;

  void validate() const;
  std::uint64_t steps() const;
};

struct PathRun {
  EnergyLedger ledger;
  std::vector<State> final_states;
  Index floored_cells = 0;
  double mass_added = 0;
};

/// Results are indexed by path and independent of the worker count.
std::vector<PathRun> run_ensemble(const EnsembleSpec& spec);

/// Number of steps of size dt covering horizon; rejects non-integral ratios.
std::uint64_t step_count(double horizon, double dt);

}  // namespace dmv
