#include "dmv/ensemble_ym.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace dmv {

void Ensemble::validate() const {
  if (members.empty()) throw InvalidArgument("ensemble: no members");
  for (const auto& s : members) detail::require_same_grid(grid(), s.grid(), "ensemble");
}

const Grid& Ensemble::grid() const {
  if (members.empty()) throw InvalidArgument("ensemble: no members");
  return members.front().grid();
}

EmpiricalYoungMeasure::EmpiricalYoungMeasure(std::vector<const State*> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InvalidArgument("young measure: no atoms");
  for (const State* s : atoms_) detail::require_same_grid(grid(), s->grid(), "young measure");
}

ScalarField EmpiricalYoungMeasure::total_mass() const {
  // Weights are stored implicitly; summing them keeps the check honest.
  ScalarField::Values w = ScalarField::Values::Zero(grid().cells());
  for (Index i = 0; i < atoms(); ++i) w += weight();
  return {grid(), std::move(w)};
}

ScalarField EmpiricalYoungMeasure::mean_density() const {
  ScalarField::Values s = ScalarField::Values::Zero(grid().cells());
  for (const State* a : atoms_) s += a->rho.values();
  return {grid(), s * weight()};
}

VectorField EmpiricalYoungMeasure::mean_momentum() const {
  VectorField::Values s = VectorField::Values::Zero(grid().cells(), dim());
  for (const State* a : atoms_) s += a->mom.values();
  return {grid(), s * weight()};
}

VectorField EmpiricalYoungMeasure::mean_velocity(double rho_floor) const {
  VectorField::Values s = VectorField::Values::Zero(grid().cells(), dim());
  for (const State* a : atoms_) s += a->mom.values().colwise() / a->rho.values().max(rho_floor);
  return {grid(), s * weight()};
}

EmpiricalYoungMeasure build_ym(const Ensemble& ens) {
  ens.validate();
  return build_ym(ens.members, 0, ens.size());
}

EmpiricalYoungMeasure build_ym(const std::vector<State>& states, Index first, Index count) {
  if (first < 0 || count < 1 || first + count > static_cast<Index>(states.size()))
    throw InvalidArgument("build_ym: member range out of bounds");
  std::vector<const State*> atoms;
  atoms.reserve(count);
  for (Index i = first; i < first + count; ++i) atoms.push_back(&states[i]);
  return EmpiricalYoungMeasure(std::move(atoms));
}

ScalarField expect(const EmpiricalYoungMeasure& ym, const Observable& F) {
  if (!F.eval) throw InvalidArgument("expect: observable '" + F.name + "' has no evaluation rule");
  const Grid& g = ym.grid();
  const int n = ym.dim();
  ScalarField::Values out = ScalarField::Values::Zero(g.cells());
  SmallVector q(n);
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    for (Index c = 0; c < g.cells(); ++c) {
      for (int d = 0; d < n; ++d) q[d] = a.mom.values()(c, d);
      const double v = F.eval(a.rho[c], q);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "expect: observable '" << F.name << "' is non-finite at cell " << c << " (atom " << i << ")";
        throw NonFiniteValue(os.str());
      }
      out[c] += v;
    }
  }
  return {g, out * ym.weight()};
}

namespace {

struct Moments {
  ScalarField::Values rho, kinetic, potential, pressure;
  VectorField::Values mom;
  TensorField::Values flux;  // <m (x) m / rho>
  Index vacuum = 0;
};

Moments moments(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double rho_floor, bool with_flux) {
  const Index cells = ym.grid().cells();
  const int n = ym.dim();
  Moments mo;
  mo.rho = mo.kinetic = mo.potential = mo.pressure = ScalarField::Values::Zero(cells);
  mo.mom = VectorField::Values::Zero(cells, n);
  if (with_flux) mo.flux = TensorField::Values::Zero(cells, n * n);
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    const auto& r = a.rho.values();
    const auto& m = a.mom.values();
    const ScalarField::Values rf = r.max(rho_floor);
    mo.vacuum += (r < rho_floor).count();
    mo.rho += r;
    mo.mom += m;
    mo.kinetic += 0.5 * m.square().rowwise().sum() / rf;
    for (Index c = 0; c < cells; ++c) {
      mo.potential[c] += potential_delta(law, r[c]);
      mo.pressure[c] += pressure_delta(law, r[c]);
    }
    if (with_flux)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) mo.flux.col(TensorField::slot(n, x, y)) += m.col(x) * m.col(y) / rf;
  }
  const double w = ym.weight();
  mo.rho *= w;
  mo.kinetic *= w;
  mo.potential *= w;
  mo.pressure *= w;
  mo.mom *= w;
  if (with_flux) mo.flux *= w;
  return mo;
}

}  // namespace

DissipationDefect dissipation_defect(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double rho_floor) {
  const Grid& g = ym.grid();
  const Moments mo = moments(ym, law, rho_floor, false);
  ScalarField::Values out(g.cells());
  for (Index c = 0; c < g.cells(); ++c) {
    const double br = mo.rho[c];
    if (!(br > 0)) throw InvalidArgument("dissipation_defect: barycentric density must be positive");
    const double bary = 0.5 * mo.mom.row(c).square().sum() / std::max(br, rho_floor) + potential_delta(law, br);
    const double mean = mo.kinetic[c] + mo.potential[c];
    double v = mean - bary;
    if (v < 0) {
      if (v < -1e-12 * std::max(1.0, std::abs(mean))) {
        std::ostringstream os;
        os << "dissipation_defect: convexity violated at cell " << c << " (defect " << v << ")";
        throw Error(os.str());
      }
      v = 0;
    }
    out[c] = v;
  }
  ScalarField density(g, std::move(out));
  const double total = integrate(density);
  return {std::move(density), total, mo.vacuum};
}

TensorField MomentumDefect::total() const {
  const int n = kinetic.dim();
  TensorField::Values v = kinetic.values();
  for (int a = 0; a < n; ++a) v.col(TensorField::slot(n, a, a)) += pressure.values();
  return {kinetic.grid(), std::move(v)};
}

MomentumDefect momentum_defect(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double rho_floor) {
  const Grid& g = ym.grid();
  const int n = ym.dim();
  const Moments mo = moments(ym, law, rho_floor, true);
  TensorField::Values kin(g.cells(), n * n);
  ScalarField::Values pr(g.cells());
  for (Index c = 0; c < g.cells(); ++c) {
    const double br = std::max(mo.rho[c], rho_floor);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Index s = TensorField::slot(n, a, b);
        kin(c, s) = mo.flux(c, s) - mo.mom(c, a) * mo.mom(c, b) / br;
      }
    pr[c] = mo.pressure[c] - pressure_delta(law, mo.rho[c]);
  }
  return {TensorField(g, std::move(kin)), ScalarField(g, std::move(pr))};
}

double domination_constant(const PressureLaw& law, int dim) { return std::max(2.0, dim * (law.gamma - 1)); }

DominationReport defect_domination_audit(const EmpiricalYoungMeasure& ym, const PressureLaw& law, double c,
                                         double rho_floor) {
  const auto md = momentum_defect(ym, law, rho_floor).total();
  const auto dd = dissipation_defect(ym, law, rho_floor);
  DominationReport rep;
  rep.bound = c;
  const int n = ym.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (Index cell = 0; cell < ym.grid().cells(); ++cell) {
    ++rep.cells;
    eig.compute(md.at(cell), Eigen::EigenvaluesOnly);
    const double norm = n == 1 ? std::abs(md.at(cell)(0, 0)) : eig.eigenvalues().cwiseAbs().sum();
    const double D = dd.density[cell];
    if (D > 1e-12) {
      const double ratio = norm / D;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio > c + 1e-9) ++rep.violations;
    } else if (norm > c * D + 1e-9) {
      ++rep.violations;
    }
  }
  return rep;
}

Snapshot export_ym(const EmpiricalYoungMeasure& ym, double time) {
  const int n = ym.dim();
  Snapshot snap{ym.grid(), time, Eigen::ArrayXXd(ym.grid().cells(), ym.atoms() * (1 + n))};
  for (Index i = 0; i < ym.atoms(); ++i) {
    snap.data.col(i * (1 + n)) = ym.atom(i).rho.values();
    for (int d = 0; d < n; ++d) snap.data.col(i * (1 + n) + 1 + d) = ym.atom(i).mom.values().col(d);
  }
  return snap;
}

}  // namespace dmv
