#pragma once

// Low-Mach / vanishing-viscosity sweep: compressible ensembles at a schedule
// of Mach numbers eps, compared path-wise against the stochastic
// incompressible Euler flow driven by the same Wiener paths.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dmv/dynamics.hpp"

namespace dmv {

/// eta with |eta| <= 1 and zeta with |zeta| <= 1 pointwise.
struct DataPerturbation {
  ScalarField eta;
  VectorField zeta;
};

/// rho0 = 1 + eps delta eta, m0 = v0 + delta zeta. Rejects div v0 != 0.
State well_prepared_data(double eps, const VectorField& v0, double delta, const DataPerturbation& shape);

/// A single randomized low Fourier mode in each of eta and zeta with
/// amplitudes in [-1/2, 1/2], keyed by (seed, path, replica).
DataPerturbation low_mode_perturbation(const Grid& g, std::uint64_t seed, int path, int replica);

/// coef * eps^power.
struct PowerLaw {
  double coef = 1;
  double power = 1;
  double operator()(double eps) const;
};

struct SweepConfig {
  std::vector<double> eps{1.0, 0.5, 0.25, 0.125};
  PressureLaw law{1.0, 2.0, 0.0, 6.0};
  PowerLaw nu{1, 2}, lambda{1, 2}, delta{1, 1};
  NoiseModel noise = NoiseModel::affine({0.1, 0.1}, {0.05, 0.0});
  Grid grid{std::vector<int>{64, 64}};
  double horizon = 0.5;
  int samples = 10;  // sample intervals over the horizon
  double grad_threshold = 2;
  int paths = 16;
  int replicas = 4;
  std::uint64_t seed = 0;
  /// dt is capped by safety * (nu + lambda) eps^2 / p'(1), the explicit
  /// Euler limit for viscously damped acoustic waves.
  double acoustic_safety = 1;
  double cfl = 0.4;
  /// Solenoidal initial velocity; Taylor-Green when empty.
  std::function<VectorField(const Grid&)> v0;
  int threads = 0;

  void validate() const;
};

VectorField taylor_green(const Grid& g);

struct SweepPoint {
  double eps = 0, nu = 0, lambda = 0, delta = 0, dt = 0;
  std::vector<double> t, Emv_mean, Emv_se, D_mean;
  /// Mean and standard error over paths of sup_t D.
  double D_sup_mean = 0, D_sup_se = 0;
  /// Smallest stopping time over paths.
  double tau_M = 0;
  double final_mean() const { return Emv_mean.back(); }
  double final_se() const { return Emv_se.back(); }
};

struct RateFit {
  double slope = 0, intercept = 0;
  bool monotone = false;
};

/// Least-squares slope of log value against log eps; `monotone` means strictly
/// decreasing as eps decreases. Needs at least three points.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values);

struct RateReport {
  std::vector<SweepPoint> points;
  RateFit fit;
  double envelope_exponent = 0;
  /// sup_t D non-increasing along decreasing eps within two standard errors.
  bool D_nonincreasing = false;
  bool pass() const { return fit.monotone && fit.slope >= 0.5 * envelope_exponent && D_nonincreasing; }
};

/// min(2 / min(gamma, 2), power of delta, nu, lambda).
double envelope_exponent(const SweepConfig& cfg);

/// Step for one eps: horizon / (samples 2^j) with the smallest j meeting the
/// CFL and acoustic caps.
double sweep_dt(const SweepConfig& cfg, double eps);

RateReport run_sweep(const SweepConfig& cfg);

/// eps,t,Emv_mean,Emv_se,D_sup,tau_M
std::string sweep_csv(const RateReport& rep);
/// Flat JSON object with slope, monotone and pass flags.
std::string sweep_summary_json(const RateReport& rep);

}  // namespace dmv
