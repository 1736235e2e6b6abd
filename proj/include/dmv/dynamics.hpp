#pragma once

// Pseudo-spectral semi-discretization of the (Mach-rescaled) stochastic
// compressible Navier-Stokes system in conservative variables (rho, m), and
// its explicit Euler-Maruyama time step.

#include <cstdint>
#include <limits>
#include <optional>

#include "dmv/constitutive.hpp"
#include "dmv/noise.hpp"
#include "dmv/snapshot.hpp"
#include "dmv/torus_field.hpp"

namespace dmv {

struct State {
  ScalarField rho;
  VectorField mom;
  double time = 0;

  State(ScalarField rho_, VectorField mom_, double time_ = 0);

  const Grid& grid() const { return rho.grid(); }
  VectorField velocity() const;
  double mass() const { return integrate(rho); }
};

struct ModelConfig {
  PressureLaw law;
  Viscosity visc;
  NoiseModel noise;
  /// Mach scaling; the pressure gradient is multiplied by 1/eps^2.
  double mach_eps = 1;
  /// Velocity-gradient threshold M for the reference stopping time.
  double grad_threshold = std::numeric_limits<double>::infinity();

  void validate() const;
  /// The pressure law with the 1/eps^2 factor folded in.
  PressureLaw effective_law() const { return law.scaled(1.0 / (mach_eps * mach_eps)); }
};

struct StepperConfig {
  /// Fixed step; when empty the step is recomputed from `cfl_dt` each step.
  std::optional<double> dt;
  double cfl = 0.4;
  double rho_floor = 1e-8;
  /// Test hook: drop the deterministic drift, keep only the noise.
  bool freeze_drift = false;

  void validate() const;
};

struct Rhs {
  ScalarField drho;
  VectorField dmom;
};

/// drho = -div m,  dm = -div(m (x) m / rho + p_delta(rho)/eps^2 I - S(grad u)),
/// with every flux divergence restricted to the 2/3-rule band.
Rhs rhs_deterministic(const ModelConfig& cfg, const State& s);

/// cfl h / max(|u| + sqrt(p_delta'(rho))/eps), further capped by the explicit
/// diffusion limit cfl h^2 / (4 (nu + lambda)).
double cfl_dt(const ModelConfig& cfg, const StepperConfig& stepper, const State& s);

/// Step size the stepper will use for `s`.
double resolve_dt(const ModelConfig& cfg, const StepperConfig& stepper, const State& s);

struct StepReport {
  Index floored_cells = 0;
  double mass_added = 0;
  double dt = 0;
};

/// Raised when the Courant number of a requested step exceeds one.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double required_dt) : Error(what), required_dt(required_dt) {}
  double required_dt;
};

/// Raised when a step produces non-finite values; carries the last good state.
class SimulationBlowup : public Error {
 public:
  SimulationBlowup(const std::string& what, Snapshot last_good) : Error(what), snapshot(std::move(last_good)) {}
  Snapshot snapshot;
};

/// One Euler-Maruyama step with increments drawn from `path` at `step`.
State step_em(const ModelConfig& cfg, const StepperConfig& stepper, const State& s, const WienerPath& path,
              std::uint64_t step, StepReport* report = nullptr);

/// Same step with caller-supplied increments (one per noise mode) and step size.
State step_em(const ModelConfig& cfg, const StepperConfig& stepper, const State& s, const Eigen::VectorXd& dW,
              double dt, StepReport* report = nullptr);

/// int (|m|^2 / (2 rho) + P_delta(rho)) dx for the effective pressure law.
double state_energy(const ModelConfig& cfg, const State& s);

}  // namespace dmv
