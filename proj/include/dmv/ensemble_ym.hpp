#pragma once

// Monte Carlo ensembles and their empirical Young measures: per cell, the
// uniform atomic measure on the members' states (rho_i, m_i).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dmv/constitutive.hpp"
#include "dmv/dynamics.hpp"

namespace dmv {

struct Ensemble {
  std::vector<State> members;
  std::uint64_t master_seed = 0;
  /// True when all members are driven by one Wiener path.
  bool shared_path = false;

  void validate() const;
  const Grid& grid() const;
  Index size() const { return static_cast<Index>(members.size()); }
};

/// Uniform-weight atomic measure per cell. Holds pointers to the member
/// states, which must outlive it.
class EmpiricalYoungMeasure {
 public:
  explicit EmpiricalYoungMeasure(std::vector<const State*> atoms);

  const Grid& grid() const { return atoms_.front()->grid(); }
  int dim() const { return grid().dim(); }
  Index atoms() const { return static_cast<Index>(atoms_.size()); }
  double weight() const { return 1.0 / static_cast<double>(atoms_.size()); }
  const State& atom(Index i) const { return *atoms_[i]; }

  /// <nu; 1> per cell.
  ScalarField total_mass() const;
  ScalarField mean_density() const;
  VectorField mean_momentum() const;
  /// <nu; m / max(rho, floor)>.
  VectorField mean_velocity(double rho_floor = 1e-8) const;

 private:
  std::vector<const State*> atoms_;
};

EmpiricalYoungMeasure build_ym(const Ensemble& ens);
/// Measure over a subset of the members, e.g. the replicas sharing one path.
EmpiricalYoungMeasure build_ym(const std::vector<State>& states, Index first, Index count);

/// Pointwise observable F(rho, m) with declared growth exponents.
struct Observable {
  std::string name;
  std::function<double(double rho, const SmallVector& m)> eval;
  double growth_rho = 0;
  double growth_m = 0;

  /// p <= gamma and q <= 2 gamma / (gamma + 1).
  bool within_budget(double gamma) const {
    return growth_rho <= gamma && growth_m <= 2 * gamma / (gamma + 1);
  }
};

/// Per-cell average of F over the atoms.
ScalarField expect(const EmpiricalYoungMeasure& ym, const Observable& F);

struct DissipationDefect {
  ScalarField density;  // per-cell oscillation defect of the energy
  double total = 0;     // integral over the torus
  Index vacuum_atoms = 0;
};

/// <nu; |m|^2 / (2 rho) + P(rho)> - (|<m>|^2 / (2 <rho>) + P(<rho>)) per cell.
DissipationDefect dissipation_defect(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double rho_floor = 1e-8);

struct MomentumDefect {
  TensorField kinetic;   // <m (x) m / rho> - <m> (x) <m> / <rho>
  ScalarField pressure;  // <p(rho)> - p(<rho>)
  TensorField total() const;
};

MomentumDefect momentum_defect(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double rho_floor = 1e-8);

/// Per-cell atom list as a snapshot: components (rho_1, m_1, rho_2, m_2, ...).
Snapshot export_ym(const EmpiricalYoungMeasure& ym, double time);

/// c = max(2, N (gamma - 1)).
double domination_constant(const PressureLaw& law, int dim);

struct DominationReport {
  double bound = 0;
  double max_ratio = 0;
  Index cells = 0;
  Index violations = 0;
  bool pass() const { return violations == 0; }
};

/// Checks |momentum defect| <= c * energy defect per cell, using the trace
/// (nuclear) norm of the tensor. Cells where both sides vanish pass.
DominationReport defect_domination_audit(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double c,
                                         double rho_floor = 1e-8);

}  // namespace dmv
