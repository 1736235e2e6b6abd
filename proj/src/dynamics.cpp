#include "dmv/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "dmv/diagnostics.hpp"

namespace dmv {

State::State(ScalarField rho_, VectorField mom_, double time_) : rho(std::move(rho_)), mom(std::move(mom_)), time(time_) {
  detail::require_same_grid(rho.grid(), mom.grid(), "state");
  if (!(rho.values() > 0).all()) throw InvalidArgument("state: density must be positive");
}

VectorField State::velocity() const {
  VectorField::Values u = mom.values().colwise() / rho.values();
  return {grid(), std::move(u)};
}

void ModelConfig::validate() const {
  law.validate();
  visc.validate();
  if (!(mach_eps > 0)) throw InvalidArgument("model: eps must be positive");
}

void StepperConfig::validate() const {
  if (dt && !(*dt > 0)) throw InvalidArgument("stepper: dt must be positive");
  if (!(cfl > 0 && cfl <= 1)) throw InvalidArgument("stepper: cfl must lie in (0, 1]");
  if (!(rho_floor > 0)) throw InvalidArgument("stepper: rho_floor must be positive");
}

Rhs rhs_deterministic(const ModelConfig& cfg, const State& s) {
  const Grid& g = s.grid();
  const int n = g.dim();
  auto& sp = spectral_for(g);
  using Spectrum = Spectral<double>::Spectrum;
  const std::complex<double> I(0, 1);
  const auto& mask = sp.dealias_mask();
  std::array<Spectrum, 2> ik;
  for (int d = 0; d < n; ++d) ik[d] = (I * sp.derivative_wavenumber(d).cast<std::complex<double>>()) * mask.cast<std::complex<double>>();

  const auto& rho = s.rho.values();
  const auto& m = s.mom.values();

  Spectrum acc = Spectrum::Zero(sp.modes());
  for (int d = 0; d < n; ++d) acc -= sp.forward(m.col(d)) * ik[d];
  ScalarField drho(g, sp.inverse(acc));

  const VectorField u = s.velocity();
  const TensorField S = stress(cfg.visc, gradient(u));
  const PressureLaw law = cfg.effective_law();
  Eigen::ArrayXd p(g.cells());
  for (Index c = 0; c < g.cells(); ++c) p[c] = pressure_delta(law, rho[c]);

  // Momentum flux F = m (x) m / rho + p I - S is symmetric; transform each
  // independent entry once.
  std::array<std::array<Spectrum, 2>, 2> Fhat;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Eigen::ArrayXd F = m.col(a) * m.col(b) / rho - S.values().col(TensorField::slot(n, a, b));
      if (a == b) F += p;
      Fhat[a][b] = sp.forward(F);
      if (b != a) Fhat[b][a] = Fhat[a][b];
    }
  }
  VectorField::Values dm(g.cells(), n);
  for (int a = 0; a < n; ++a) {
    acc.setZero();
    for (int b = 0; b < n; ++b) acc -= Fhat[a][b] * ik[b];
    dm.col(a) = sp.inverse(acc);
  }
  return {std::move(drho), VectorField(g, std::move(dm))};
}

double cfl_dt(const ModelConfig& cfg, const StepperConfig& stepper, const State& s) {
  const PressureLaw law = cfg.effective_law();
  const auto& rho = s.rho.values();
  const Eigen::ArrayXd speed = (s.mom.values().colwise() / rho).square().rowwise().sum().sqrt();
  double max_speed = 0;
  for (Index c = 0; c < rho.size(); ++c) max_speed = std::max(max_speed, speed[c] + sound_speed(law, rho[c]));
  const double h = s.grid().min_spacing();
  double dt = stepper.cfl * h / max_speed;
  const double diffusivity = cfg.visc.nu + cfg.visc.lambda;
  if (diffusivity > 0) dt = std::min(dt, stepper.cfl * h * h / (4 * diffusivity));
  return dt;
}

double resolve_dt(const ModelConfig& cfg, const StepperConfig& stepper, const State& s) {
  return stepper.dt ? *stepper.dt : cfl_dt(cfg, stepper, s);
}

State step_em(const ModelConfig& cfg, const StepperConfig& stepper, const State& s, const WienerPath& path,
              std::uint64_t step, StepReport* report) {
  const double dt = resolve_dt(cfg, stepper, s);
  return step_em(cfg, stepper, s, path.sample_increments(step, dt), dt, report);
}

State step_em(const ModelConfig& cfg, const StepperConfig& stepper, const State& s, const Eigen::VectorXd& dW,
              double dt, StepReport* report) {
  if (dW.size() != cfg.noise.modes()) throw InvalidArgument("step_em: increment count does not match noise modes");
  StepperConfig hard = stepper;
  hard.cfl = 1.0;
  const double limit = cfl_dt(cfg, hard, s);
  if (dt > limit) {
    std::ostringstream os;
    os << "step_em: dt = " << dt << " exceeds the Courant limit " << limit;
    throw CflViolation(os.str(), limit);
  }
  const Grid& g = s.grid();
  try {
    ScalarField::Values rho = s.rho.values();
    VectorField::Values m = s.mom.values();
    if (!stepper.freeze_drift) {
      const Rhs f = rhs_deterministic(cfg, s);
      rho += dt * f.drho.values();
      m += dt * f.dmom.values();
    }
    for (int k = 0; k < cfg.noise.modes(); ++k) {
      if (dW[k] == 0) continue;
      m += dW[k] * apply_G(cfg.noise, s.rho, s.mom, k).values();
    }
    if (!rho.isFinite().all() || !m.isFinite().all()) throw NonFiniteValue("step_em: non-finite update");

    const Index floored = (rho < stepper.rho_floor).count();
    double added = 0;
    if (floored > 0) {
      const ScalarField::Values before = rho;
      rho = rho.max(stepper.rho_floor);
      added = (rho - before).sum() * g.cell_volume();
      std::ostringstream os;
      os << "step_em: density floor activated in " << floored << " cells at t = " << s.time + dt
         << ", mass added " << added;
      warn(os.str());
    }
    if (report) *report = {floored, added, dt};
    return State(ScalarField(g, std::move(rho)), VectorField(g, std::move(m)), s.time + dt);
  } catch (const NonFiniteValue& e) {
    throw SimulationBlowup(std::string("step_em: non-finite state after step at t = ") + std::to_string(s.time) +
                               " (" + e.what() + ")",
                           make_state_snapshot(s.rho, s.mom, s.time));
  }
}

double state_energy(const ModelConfig& cfg, const State& s) {
  const PressureLaw law = cfg.effective_law();
  const auto& rho = s.rho.values();
  Eigen::ArrayXd e = 0.5 * s.mom.values().square().rowwise().sum() / rho;
  for (Index c = 0; c < rho.size(); ++c) e[c] += potential_delta(law, rho[c]);
  return e.sum() * s.grid().cell_volume();
}

}  // namespace dmv
