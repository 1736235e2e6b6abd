#pragma once

// Relative energy between an empirical Young measure and a smooth reference
// pair (r, U), the nine-term remainder of the relative energy inequality, the
// realized martingale M_RE, and the coarse-versus-fine weak-strong experiment.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dmv/dynamics.hpp"
#include "dmv/ensemble_ym.hpp"

namespace dmv {

/// Smooth reference with its Ito decomposition dr = D^d r dt + sum_k D^s r_k dW_k
/// (and likewise for U). Empty decomposition entries are reported by name when
/// a computation needs them.
struct ReferencePair {
  ScalarField r;
  VectorField U;
  std::optional<ScalarField> drift_r;
  std::optional<VectorField> drift_U;
  std::optional<std::vector<ScalarField>> diffusion_r;  // one per noise mode
  std::optional<std::vector<VectorField>> diffusion_U;  // one per noise mode

  /// Checks grids and r_lo <= r <= r_hi with r_lo > 0.
  void validate(double r_lo = 0, double r_hi = std::numeric_limits<double>::infinity()) const;
};

/// Decomposition of a compressible reference state (r, rU):
/// D^d r = -div(rU), D^d U = -U.grad U - grad p(r)/r + div S(grad U)/r,
/// D^s U_k = G_k(r, rU)/r, D^s r = 0.
ReferencePair compressible_reference(const ModelConfig& model, const ScalarField& r, const VectorField& rU);

/// Incompressible Euler reference (1, v): D^d U = -P_H[(v.grad)v],
/// D^s U_k = G_k(1, v), D^d r = D^s r = 0.
ReferencePair euler_reference(const NoiseModel& noise, const VectorField& v);

/// Restricts every field of the pair to `target` by spectral resampling.
ReferencePair resample(const ReferencePair& pair, const Grid& target);

/// int <nu; |m - rho U|^2 / (2 rho) + H(rho, r)> dx + D, with `law` the
/// effective (Mach-scaled) pressure law.
double relative_energy(const EmpiricalYoungMeasure& ym, double D, const ScalarField& r, const VectorField& U,
                       const PressureLaw& law, double rho_floor = 1e-8);

inline constexpr int kRemainderTerms = 9;

struct RemainderBreakdown {
  std::array<double, kRemainderTerms> terms{};
  double total() const;
};

/// The nine remainder integrals in display order:
///  1  int S(grad U):(grad U - grad <u>)
///  2  int (<rho> U - <m>).(D^d U + U.grad U)
///  3  int <(m - rho U) (x) (rho U - m) / rho> : grad U
///  4  int (r - <rho>) P''(r) D^d r + grad P'(r).(r U - <m>)
///  5  int (p(r) - <p(rho)>) div U
///  6  1/2 sum_k int <|G_k(rho, m) - rho D^s U_k|^2 / rho>
///  7  -int grad U : mu_m   (mu_m = 0 unless supplied)
///  8  -1/2 sum_k int <rho> P'''(r) |D^s r_k|^2
///  9  1/2 sum_k int p''(r) |D^s r_k|^2
RemainderBreakdown remainder(const EmpiricalYoungMeasure& ym, const ReferencePair& pair, const ModelConfig& model,
                             const TensorField* mu_m = nullptr, double rho_floor = 1e-8);

/// Increment of M_RE = M_E - M_1 + M_2 + M_3 - M_4 over one step with increments dW.
double relative_martingale_increment(const EmpiricalYoungMeasure& ym, const ReferencePair& pair,
                                     const ModelConfig& model, const Eigen::VectorXd& dW, double rho_floor = 1e-8);

/// int (S(grad <u>) - S(grad U)) : (grad <u> - grad U) dx.
double relative_dissipation(const EmpiricalYoungMeasure& ym, const VectorField& U, const Viscosity& visc,
                            double rho_floor = 1e-8);

/// max_t E(t) - (E(0) + bias) e^{c t}; the series passes when this is <= 1e-12.
double gronwall_check(const std::vector<double>& t, const std::vector<double>& E, double c, double bias);

/// Smallest c with E(t) <= (E(0) + bias) e^{c t} at every sample.
double gronwall_fit(const std::vector<double>& t, const std::vector<double>& E, double bias);

struct WeakStrongConfig {
  ModelConfig model;
  Grid grid{std::vector<int>{16}};  // ensemble grid
  double dt = 1e-2;                 // ensemble step
  double horizon = 1.0;
  int sample_every = 1;
  int paths = 16;
  int replicas = 1;
  std::uint64_t seed = 0;
  /// Run the reference at the ensemble's grid and step (self-comparison).
  bool self_comparison = false;
  /// Smooth reference data, sampled on whichever grid is asked for.
  std::function<State(const Grid&)> reference_initial;
  /// Ensemble data; defaults to the reference data on the ensemble grid.
  std::function<State(const Grid&, int path, int replica)> member_initial;
  /// Bias allowance in the Grönwall fit.
  double bias = 0;
  int threads = 0;

  void validate() const;
};

struct RelativeEnergyReport {
  std::vector<double> t;
  std::vector<double> Emv_mean, Emv_se;
  /// Cumulative time integrals of the remainder terms, mean over paths.
  std::vector<std::array<double, kRemainderTerms>> remainder_cum;
  std::vector<double> martingale_mean, martingale_se;
  /// E_mv(t) + int relative dissipation - E_mv(0) - M_RE(t) - int R, mean over paths.
  std::vector<double> inequality_residual_mean, inequality_residual_se;
  std::vector<double> gronwall_residual;
  double gronwall_c = 0;
  double bias = 0;
  /// Earliest stopping time over paths (the horizon when the threshold is never hit).
  double tau_min = 0;
};

RelativeEnergyReport weak_strong_experiment(const WeakStrongConfig& cfg);

std::string relative_energy_csv(const RelativeEnergyReport& rep);

}  // namespace dmv
