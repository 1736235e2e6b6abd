#include "dmv/simulation.hpp"

#include <cmath>

#include "dmv/parallel.hpp"

namespace dmv {

std::uint64_t step_count(double horizon, double dt) {
  if (!(dt > 0) || !(horizon >= 0)) throw InvalidArgument("step_count: need dt > 0 and horizon >= 0");
  const double n = horizon / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n)) throw InvalidArgument("step_count: horizon is not a multiple of dt");
  return static_cast<std::uint64_t>(r);
}

void EnsembleSpec::validate() const {
  model.validate();
  stepper.validate();
  if (!stepper.dt) throw InvalidArgument("ensemble: a fixed dt is required");
  if (paths < 1 || replicas < 1) throw InvalidArgument("ensemble: need at least one path and one replica");
  if (sample_every < 1) throw InvalidArgument("ensemble: sample_every must be positive");
  if (!initial) throw InvalidArgument("ensemble: missing initial data");
  (void)steps();
}

std::uint64_t EnsembleSpec::steps() const { return step_count(horizon, *stepper.dt); }

std::vector<PathRun> run_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  const double dt = *spec.stepper.dt;
  const std::uint64_t steps = spec.steps();
  std::vector<PathRun> out(spec.paths);
  parallel_for(spec.paths, spec.threads, [&](Index p) {
    const WienerPath w(spec.seed, std::uint64_t(p), spec.model.noise.modes(), spec.aggregation);
    std::vector<State> states;
    states.reserve(spec.replicas);
    for (int r = 0; r < spec.replicas; ++r) states.push_back(spec.initial(spec.grid, int(p), r));
    LedgerAccumulator acc(spec.model, spec.stepper.rho_floor);
    PathRun& run = out[p];
    auto sample = [&](std::uint64_t n) {
      acc.sample(build_ym(states, 0, spec.replicas), states.front().time);
      if (spec.on_sample) spec.on_sample(int(p), n, states);
    };
    sample(0);
    for (std::uint64_t n = 0; n < steps; ++n) {
      const Eigen::VectorXd dW = w.sample_increments(n, dt);
      acc.advance(build_ym(states, 0, spec.replicas), dW, dt);
      for (auto& s : states) {
        StepReport rep;
        s = step_em(spec.model, spec.stepper, s, dW, dt, &rep);
        run.floored_cells += rep.floored_cells;
        run.mass_added += rep.mass_added;
      }
      if ((n + 1) % std::uint64_t(spec.sample_every) == 0 || n + 1 == steps) sample(n + 1);
    }
    run.ledger = acc.ledger();
    run.final_states = std::move(states);
  });
  return out;
}

}  // namespace dmv
