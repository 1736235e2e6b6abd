#pragma once

// Barotropic gamma-law pressure, its potential, the artificial-pressure
// regularization and the Newtonian stress. Everything here is a pure function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dmv/torus_field.hpp"

namespace dmv {

template <typename Scalar>
struct BasicPressureLaw {
  Scalar a = 1;          // 1/Mach^2-type coefficient
  Scalar gamma = 2;      // adiabatic exponent, > 1
  Scalar delta = 0;      // artificial pressure strength
  Scalar Gamma_art = 6;  // artificial exponent, >= max(6, gamma) when delta > 0

  void validate() const {
    if (!(a > 0)) throw InvalidArgument("pressure law: a must be positive");
    if (!(gamma > 1)) throw InvalidArgument("pressure law: gamma must exceed 1");
    if (!(delta >= 0)) throw InvalidArgument("pressure law: delta must be nonnegative");
    if (delta > 0 && !(Gamma_art >= std::max<Scalar>(6, gamma)))
      throw InvalidArgument("pressure law: Gamma must be >= max(6, gamma) when delta > 0");
  }

  /// The same law with p and P multiplied by s (used for the 1/eps^2 scaling).
  BasicPressureLaw scaled(Scalar s) const { return {a * s, gamma, delta * s, Gamma_art}; }
};

using PressureLaw = BasicPressureLaw<double>;

namespace detail {
template <typename Scalar>
void require_nonnegative_density(Scalar rho, const char* what) {
  if (!(rho >= 0)) throw InvalidArgument(std::string(what) + ": density must be nonnegative");
}
template <typename Scalar>
Scalar xlogx(Scalar x) {
  return x > 0 ? x * std::log(x) : Scalar(0);
}
}  // namespace detail

template <typename Scalar>
Scalar pressure(const BasicPressureLaw<Scalar>& law, Scalar rho) {
  detail::require_nonnegative_density(rho, "pressure");
  return law.a * std::pow(rho, law.gamma);
}

/// P(rho) = rho * int_1^rho p(z)/z^2 dz in closed form.
template <typename Scalar>
Scalar potential(const BasicPressureLaw<Scalar>& law, Scalar rho) {
  detail::require_nonnegative_density(rho, "potential");
  return law.a * (std::pow(rho, law.gamma) - rho) / (law.gamma - 1);
}

template <typename Scalar>
Scalar pressure_delta(const BasicPressureLaw<Scalar>& law, Scalar rho) {
  Scalar p = pressure(law, rho);
  if (law.delta > 0) p += law.delta * (rho + std::pow(rho, law.Gamma_art));
  return p;
}

template <typename Scalar>
Scalar potential_delta(const BasicPressureLaw<Scalar>& law, Scalar rho) {
  Scalar P = potential(law, rho);
  if (law.delta > 0)
    P += law.delta * (detail::xlogx(rho) + std::pow(rho, law.Gamma_art) / (law.Gamma_art - 1));
  return P;
}

/// d^order p_delta / d rho^order for order 1 or 2.
template <typename Scalar>
Scalar pressure_delta_derivative(const BasicPressureLaw<Scalar>& law, Scalar rho, int order) {
  const Scalar g = law.gamma, G = law.Gamma_art;
  switch (order) {
    case 1: {
      Scalar v = law.a * g * std::pow(rho, g - 1);
      if (law.delta > 0) v += law.delta * (1 + G * std::pow(rho, G - 1));
      return v;
    }
    case 2: {
      Scalar v = law.a * g * (g - 1) * std::pow(rho, g - 2);
      if (law.delta > 0) v += law.delta * G * (G - 1) * std::pow(rho, G - 2);
      return v;
    }
    default:
      throw InvalidArgument("pressure_delta_derivative: order must be 1 or 2");
  }
}

/// d^order P_delta / d rho^order for order 1..3; needs rho > 0.
template <typename Scalar>
Scalar potential_delta_derivative(const BasicPressureLaw<Scalar>& law, Scalar rho, int order) {
  if (!(rho > 0)) throw InvalidArgument("potential_delta_derivative: density must be positive");
  const Scalar g = law.gamma, G = law.Gamma_art;
  Scalar v = 0;
  switch (order) {
    case 1:
      v = law.a * (g * std::pow(rho, g - 1) - 1) / (g - 1);
      if (law.delta > 0) v += law.delta * (std::log(rho) + 1 + G * std::pow(rho, G - 1) / (G - 1));
      return v;
    case 2:
      v = law.a * g * std::pow(rho, g - 2);
      if (law.delta > 0) v += law.delta * (1 / rho + G * std::pow(rho, G - 2));
      return v;
    case 3:
      v = law.a * g * (g - 2) * std::pow(rho, g - 3);
      if (law.delta > 0) v += law.delta * (-1 / (rho * rho) + G * (G - 2) * std::pow(rho, G - 3));
      return v;
    default:
      throw InvalidArgument("potential_delta_derivative: order must be 1, 2 or 3");
  }
}

template <typename Scalar>
Scalar sound_speed(const BasicPressureLaw<Scalar>& law, Scalar rho) {
  return std::sqrt(pressure_delta_derivative(law, rho, 1));
}

/// H(rho, r) = P(rho) - P'(r)(rho - r) - P(r) for the delta-regularized
/// potential. Close to the diagonal the second-order Taylor form is used.
template <typename Scalar>
Scalar relative_H(const BasicPressureLaw<Scalar>& law, Scalar rho, Scalar r) {
  detail::require_nonnegative_density(rho, "relative_H");
  if (!(r > 0)) throw InvalidArgument("relative_H: reference density must be positive");
  const Scalar d = rho - r;
  if (std::abs(d) < Scalar(1e-6) * r) {
    const Scalar p2 = potential_delta_derivative(law, r, 2);
    const Scalar p3 = potential_delta_derivative(law, r, 3);
    return d * d * (p2 / 2 + p3 * d / 6);
  }
  const Scalar h = potential_delta(law, rho) - potential_delta_derivative(law, r, 1) * d - potential_delta(law, r);
  return std::max<Scalar>(h, 0);
}

struct RelativeHBoundAudit {
  double c_box = 0;   // min H / |rho - r|^2 over alpha < rho, r < 1/alpha
  double c_far = 0;   // min H / (1 + rho^gamma) over alpha < r < 1/alpha, rho outside [alpha/2, 2/alpha]
  double min_H = 0;   // smallest H seen anywhere on the search grid
};

/// Grid search for the two-regime lower bound of H with `n` points per axis.
template <typename Scalar>
RelativeHBoundAudit relative_H_bound_audit(const BasicPressureLaw<Scalar>& law, Scalar alpha, int n = 200) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("relative_H_bound_audit: alpha must lie in (0, 1)");
  if (n < 2) throw InvalidArgument("relative_H_bound_audit: need at least two points");
  RelativeHBoundAudit out;
  out.c_box = out.c_far = out.min_H = std::numeric_limits<double>::infinity();
  const Scalar lo = alpha, hi = 1 / alpha;
  auto interior = [&](int i) { return lo + (hi - lo) * (Scalar(i) + Scalar(0.5)) / Scalar(n); };
  for (int j = 0; j < n; ++j) {
    const Scalar r = interior(j);
    for (int i = 0; i < n; ++i) {
      const Scalar rho = interior(i);
      if (rho == r) continue;
      const Scalar h = relative_H(law, rho, r);
      out.min_H = std::min<double>(out.min_H, h);
      out.c_box = std::min<double>(out.c_box, h / ((rho - r) * (rho - r)));
    }
    // Far regime: rho in [0, alpha/2) and (2/alpha, 100/alpha].
    for (int i = 0; i < n; ++i) {
      const Scalar t = Scalar(i) / Scalar(n - 1);
      for (const Scalar rho : {t * alpha / 2 * Scalar(0.999), 2 / alpha * (1 + Scalar(0.001)) + t * 98 / alpha}) {
        const Scalar h = relative_H(law, rho, r);
        out.min_H = std::min<double>(out.min_H, h);
        out.c_far = std::min<double>(out.c_far, h / (1 + std::pow(rho, law.gamma)));
      }
    }
  }
  return out;
}

template <typename Scalar>
struct BasicViscosity {
  Scalar nu = 1;      // shear, > 0
  Scalar lambda = 0;  // bulk, >= 0

  void validate() const {
    if (!(nu > 0)) throw InvalidArgument("viscosity: nu must be positive");
    if (!(lambda >= 0)) throw InvalidArgument("viscosity: lambda must be nonnegative");
  }
  Scalar eta(int dim) const { return lambda + Scalar(dim - 2) * nu / Scalar(dim); }
};

using Viscosity = BasicViscosity<double>;

/// S = nu (G + G^T - (2/N) tr G I) + lambda tr G I with G = grad u.
template <typename Scalar>
BasicTensorField<Scalar> stress(const BasicViscosity<Scalar>& visc, const BasicTensorField<Scalar>& grad_u) {
  const int n = grad_u.dim();
  using T = BasicTensorField<Scalar>;
  const auto& G = grad_u.values();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> div = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(G.rows());
  for (int a = 0; a < n; ++a) div += G.col(T::slot(n, a, a));
  typename T::Values S(G.rows(), n * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      S.col(T::slot(n, a, b)) = visc.nu * (G.col(T::slot(n, a, b)) + G.col(T::slot(n, b, a)));
      if (a == b) S.col(T::slot(n, a, b)) += (visc.lambda - 2 * visc.nu / Scalar(n)) * div;
    }
  }
  return {grad_u.grid(), std::move(S)};
}

/// Pointwise contraction A:B = sum_ab A_ab B_ab.
template <typename Scalar>
BasicScalarField<Scalar> contract(const BasicTensorField<Scalar>& A, const BasicTensorField<Scalar>& B) {
  detail::require_same_grid(A.grid(), B.grid(), "contract");
  return {A.grid(), (A.values() * B.values()).rowwise().sum()};
}

}  // namespace dmv
