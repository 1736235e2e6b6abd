#pragma once

// Stochastic incompressible Euler system on the torus, the low-Mach limit
// target, advanced by a projected explicit Euler-Maruyama scheme.

#include <cstdint>
#include <vector>

#include "dmv/noise.hpp"
#include "dmv/torus_field.hpp"

namespace dmv {

struct EulerState {
  VectorField v;
  ScalarField pi;  // zero-mean pressure of v
  double time = 0;

  /// `v` must already be solenoidal; divergence above 1e-8 is rejected.
  explicit EulerState(VectorField v_, double time_ = 0);
};

/// Pi with grad Pi = P_H[(v.grad)v] - (v.grad)v, i.e. Pi = -inv_lap div[(v.grad)v].
ScalarField pressure_from_projection(const VectorField& v);

/// (v.grad)v evaluated pseudo-spectrally with 2/3 dealiasing.
VectorField convective_term(const VectorField& v);

/// -P_H[(v.grad)v] = -grad Pi - (v.grad)v.
VectorField euler_drift(const VectorField& v);

/// Rejects noise whose coefficients G(1, v) would leave the solenoidal space.
void require_solenoidal_noise(const NoiseModel& noise);

/// cfl h / max|v|; infinite for v = 0.
double euler_cfl_dt(const VectorField& v, double cfl = 0.4);

EulerState step_em_euler(const EulerState& s, const NoiseModel& noise, const Eigen::VectorXd& dW, double dt);
EulerState step_em_euler(const EulerState& s, const NoiseModel& noise, const WienerPath& path, std::uint64_t step,
                         double dt);

/// max over cells of the spectral norm of grad v.
double gradient_sup_norm(const VectorField& v);

/// First sample time whose gradient norm exceeds M, or `horizon` if none.
double stopping_time_tau_M(const std::vector<double>& times, const std::vector<double>& grad_norms, double M,
                           double horizon);

}  // namespace dmv
