#pragma once

// Truncated cylindrical Wiener process and the momentum diffusion
// coefficients G_k(rho, m). Two kinds of coefficient are supported:
//
//   affine:  G_k(rho, m) = rho K_k e_(k mod N) + L_k m
//   general: user callables G_k(x, rho, q) with a declared Lipschitz bound
//
// Mode indices are zero-based throughout.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "dmv/torus_field.hpp"

namespace dmv {

enum class NoiseKind { affine, general };

using Point = std::array<double, 2>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

struct GeneralMode {
  /// Returns the N momentum components of G_k at (x, rho, q).
  std::function<SmallVector(const Point& x, double rho, const SmallVector& q)> coefficient;
  /// Declared alpha_k with |d_rho G_k| + |grad_q G_k| <= alpha_k.
  double lipschitz = 0;
};

class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel none() { return {}; }
  static NoiseModel affine(std::vector<double> K, std::vector<double> L, double tail_mass = 0);
  /// G_k(x, 0, 0) = 0 is enforced by subtracting the value at the origin.
  static NoiseModel general(std::vector<GeneralMode> modes, double tail_mass = 0);

  NoiseKind kind() const { return kind_; }
  int modes() const { return kind_ == NoiseKind::affine ? static_cast<int>(K_.size()) : static_cast<int>(general_.size()); }
  double K(int k) const { return K_.at(k); }
  double L(int k) const { return L_.at(k); }
  double alpha(int k) const;
  double alpha_sum() const;
  /// Declared sum of alpha_k over the truncated modes k >= modes().
  double tail_mass() const { return tail_mass_; }

  /// Pointwise G_k; `m` has N components.
  SmallVector at(int k, const Point& x, double rho, const SmallVector& m) const;

 private:
  NoiseKind kind_ = NoiseKind::affine;
  std::vector<double> K_, L_;
  std::vector<GeneralMode> general_;
  double tail_mass_ = 0;
};

/// Field-level G_k(rho, m).
VectorField apply_G(const NoiseModel& model, const ScalarField& rho, const VectorField& m, int k);

/// sum_k |G_k(rho, m)|^2 / rho per cell. Cells with rho below `rho_floor`
/// use the floored quotient; vacuum cells carrying momentum are counted,
/// warned about and reported through `vacuum_cells`.
ScalarField ito_correction_density(const NoiseModel& model, const ScalarField& rho, const VectorField& m,
                                   double rho_floor = 1e-8, Index* vacuum_cells = nullptr);

/// Per-atom version of the same quantity.
double ito_correction_at(const NoiseModel& model, const Point& x, double rho, const SmallVector& m,
                         double rho_floor = 1e-8);

/// Increments of one realization of the truncated Wiener process. The key
/// (seed, path, mode, step) fully determines every draw. With aggregation
/// 2^j a step sums 2^j base increments, so a path sampled at dt and at
/// dt / 2^j agrees exactly on the coarse time grid.
class WienerPath {
 public:
  WienerPath(std::uint64_t seed, std::uint64_t path, int modes, int aggregation = 1);

  int modes() const { return modes_; }
  int aggregation() const { return aggregation_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path() const { return path_; }

  /// Normal(0, dt) per mode for time step `step`.
  Eigen::VectorXd sample_increments(std::uint64_t step, double dt) const;

 private:
  std::uint64_t seed_, path_;
  int modes_;
  int aggregation_;
};

/// Standard normal draw determined by a four-part key.
double keyed_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t mode, std::uint64_t step);
/// Uniform (0, 1] draw determined by a four-part key.
double keyed_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t mode, std::uint64_t step);

struct LipschitzAuditReport {
  int samples = 0;
  int violations = 0;
  double max_ratio = 0;  // max |dG| / (alpha_k (|drho| + |dq|))
};

/// Random-pair check of the declared alpha_k on rho in [0, rho_max], |q| <= q_max.
LipschitzAuditReport lipschitz_audit(const NoiseModel& model, int k, int dim, int samples, std::uint64_t seed,
                                     double rho_max = 4.0, double q_max = 4.0);

struct IsometryAuditReport {
  double sample_variance = 0;
  double expected_variance = 0;
  double standard_error = 0;
  bool pass = false;
};

/// Monte Carlo check of the Ito isometry for I = sum_k int g_k(t) dW_k.
IsometryAuditReport ito_isometry_audit(const std::function<double(int mode, double t)>& integrand, int modes,
                                       double dt, double horizon, int paths, std::uint64_t seed);

}  // namespace dmv
