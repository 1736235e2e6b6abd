#include "dmv/energy_ledger.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dmv/parallel.hpp"

namespace dmv {

double total_energy(const EmpiricalYoungMeasure& ym, double D, const PressureLaw& law, double rho_floor) {
  double s = 0;
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    const auto& r = a.rho.values();
    s += (0.5 * a.mom.values().square().rowwise().sum() / r.max(rho_floor)).sum();
    for (Index c = 0; c < r.size(); ++c) s += potential_delta(law, r[c]);
  }
  return s * ym.weight() * ym.grid().cell_volume() + D;
}

double energy_residual(const EnergyLedger& ledger, std::size_t tau, std::size_t t) {
  if (!(tau < t) || t >= ledger.rows.size()) throw InvalidArgument("energy_residual: need tau < t within the ledger");
  const LedgerRow& a = ledger.rows[tau];
  const LedgerRow& b = ledger.rows[t];
  return (b.E + (b.dissipation_cum - a.dissipation_cum)) -
         (a.E + (b.ito_cum - a.ito_cum) + (b.martingale - a.martingale));
}

LedgerAccumulator::LedgerAccumulator(ModelConfig model, double rho_floor)
    : model_(std::move(model)), law_(model_.effective_law()), rho_floor_(rho_floor) {}

void LedgerAccumulator::sample(const EmpiricalYoungMeasure& ym, double t) {
  LedgerRow row;
  row.t = t;
  row.D = dissipation_defect(ym, law_, rho_floor_).total;
  row.E = total_energy(ym, row.D, law_, rho_floor_);
  row.dissipation_cum = dissipation_;
  row.ito_cum = ito_;
  row.martingale = martingale_;
  ledger_.rows.push_back(row);
  if (ledger_.rows.size() > 1) ledger_.rows.back().residual = energy_residual(ledger_, 0, ledger_.rows.size() - 1);
}

void LedgerAccumulator::advance(const EmpiricalYoungMeasure& ym, const Eigen::VectorXd& dW, double dt) {
  const Grid& g = ym.grid();
  const double vol = g.cell_volume();
  const VectorField u = ym.mean_velocity(rho_floor_);
  const TensorField gu = gradient(u);
  dissipation_ += dt * integrate(contract(stress(model_.visc, gu), gu));

  const NoiseModel& noise = model_.noise;
  if (noise.modes() == 0) return;
  double ito = 0;
  Eigen::VectorXd drive = Eigen::VectorXd::Zero(noise.modes());
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    ito += ito_correction_density(noise, a.rho, a.mom, rho_floor_).values().sum();
    const VectorField::Values ua = a.mom.values().colwise() / a.rho.values().max(rho_floor_);
    for (int k = 0; k < noise.modes(); ++k)
      if (dW[k] != 0) drive[k] += (ua * apply_G(noise, a.rho, a.mom, k).values()).sum();
  }
  ito_ += dt * 0.5 * ito * ym.weight() * vol;
  martingale_ += drive.dot(dW) * ym.weight() * vol;
}

LedgerStats ledger_stats(const std::vector<EnergyLedger>& ledgers) {
  if (ledgers.empty()) throw InvalidArgument("ledger_stats: no ledgers");
  const std::size_t rows = ledgers.front().rows.size();
  for (const auto& l : ledgers)
    if (l.rows.size() != rows) throw InvalidArgument("ledger_stats: ledgers have different lengths");
  const double M = static_cast<double>(ledgers.size());
  LedgerStats out;
  out.mean.rows.resize(rows);
  out.standard_error.rows.resize(rows);
  using Field = double LedgerRow::*;
  const Field fields[] = {&LedgerRow::E,       &LedgerRow::D,          &LedgerRow::dissipation_cum,
                          &LedgerRow::ito_cum, &LedgerRow::martingale, &LedgerRow::residual};
  for (std::size_t r = 0; r < rows; ++r) {
    out.mean.rows[r].t = out.standard_error.rows[r].t = ledgers.front().rows[r].t;
    for (Field f : fields) {
      double s = 0, s2 = 0;
      for (const auto& l : ledgers) s += l.rows[r].*f;
      const double mean = s / M;
      for (const auto& l : ledgers) s2 += (l.rows[r].*f - mean) * (l.rows[r].*f - mean);
      out.mean.rows[r].*f = mean;
      out.standard_error.rows[r].*f = M > 1 ? std::sqrt(s2 / (M - 1) / M) : 0.0;
    }
  }
  return out;
}

std::string ledger_csv_header() { return "t,E,D,dissipation_cum,ito_cum,martingale,residual\n"; }

std::string ledger_csv(const EnergyLedger& ledger) {
  std::string out = ledger_csv_header();
  char buf[512];
  for (const auto& r : ledger.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.E, r.D, r.dissipation_cum,
                  r.ito_cum, r.martingale, r.residual);
    out += buf;
  }
  return out;
}

std::string ledger_stats_csv(const LedgerStats& stats) {
  std::string out = "t,E,D,dissipation_cum,ito_cum,martingale,residual,E_se,D_se,dissipation_cum_se,ito_cum_se,martingale_se,residual_se\n";
  char buf[1024];
  for (std::size_t i = 0; i < stats.mean.rows.size(); ++i) {
    const LedgerRow& m = stats.mean.rows[i];
    const LedgerRow& s = stats.standard_error.rows[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.t,
                  m.E, m.D, m.dissipation_cum, m.ito_cum, m.martingale, m.residual, s.E, s.D, s.dissipation_cum,
                  s.ito_cum, s.martingale, s.residual);
    out += buf;
  }
  return out;
}

PoincareReport poincare_ratio(const EmpiricalYoungMeasure& ym, double D, double c_p, double rho_floor) {
  const VectorField mu = ym.mean_velocity(rho_floor);
  double osc = 0;
  for (Index i = 0; i < ym.atoms(); ++i) {
    const State& a = ym.atom(i);
    const VectorField::Values du = (a.mom.values().colwise() / a.rho.values().max(rho_floor)) - mu.values();
    osc += du.square().sum();
  }
  PoincareReport rep;
  rep.oscillation = osc * ym.weight() * ym.grid().cell_volume();
  rep.D = D;
  if (D > 0) {
    rep.ratio = rep.oscillation / D;
    rep.pass = rep.ratio <= c_p;
  } else {
    rep.ratio = 0;
    rep.pass = rep.oscillation <= 1e-14;
  }
  return rep;
}

CrossVariationReport cross_variation_audit(const CrossVariationConfig& cfg) {
  if (!cfg.initial) throw InvalidArgument("cross_variation_audit: missing initial data");
  const int K = cfg.model.noise.modes();
  if (cfg.f.coupling.size() != 0 && cfg.f.coupling.size() != K)
    throw InvalidArgument("cross_variation_audit: coupling length must match the noise modes");
  if (cfg.component < 0 || cfg.component >= cfg.grid.dim())
    throw InvalidArgument("cross_variation_audit: momentum component out of range");
  if (cfg.paths < 2) throw InvalidArgument("cross_variation_audit: need at least two paths");
  const Eigen::VectorXd b = cfg.f.coupling.size() ? cfg.f.coupling : Eigen::VectorXd::Zero(K);
  const auto steps = static_cast<std::uint64_t>(std::llround(cfg.horizon / cfg.dt));
  StepperConfig stepper;
  stepper.dt = cfg.dt;

  std::vector<double> product(cfg.paths), compensator(cfg.paths);
  parallel_for(cfg.paths, cfg.threads, [&](Index p) {
    const WienerPath w(cfg.seed, std::uint64_t(p), K);
    State s = cfg.initial(cfg.grid);
    const double m0 = integrate(s.mom.component(cfg.component));
    double f = 0, comp = 0;
    for (std::uint64_t n = 0; n < steps; ++n) {
      const Eigen::VectorXd dW = w.sample_increments(n, cfg.dt);
      for (int k = 0; k < K; ++k)
        if (b[k] != 0) comp += b[k] * integrate(apply_G(cfg.model.noise, s.rho, s.mom, k).component(cfg.component)) * cfg.dt;
      f += cfg.f.drift * cfg.dt + b.dot(dW);
      // The independent driver is keyed off the complemented seed.
      if (cfg.f.independent != 0)
        f += cfg.f.independent * std::sqrt(cfg.dt) * keyed_normal(~cfg.seed, std::uint64_t(p), 0, n);
      s = step_em(cfg.model, stepper, s, dW, cfg.dt);
    }
    product[p] = f * (integrate(s.mom.component(cfg.component)) - m0);
    compensator[p] = comp;
  });

  CrossVariationReport rep;
  const double M = cfg.paths;
  double sd = 0;
  for (Index p = 0; p < cfg.paths; ++p) {
    rep.estimate += product[p] / M;
    rep.expected += compensator[p] / M;
  }
  rep.difference = rep.estimate - rep.expected;
  for (Index p = 0; p < cfg.paths; ++p) {
    const double x = product[p] - compensator[p] - rep.difference;
    sd += x * x;
  }
  rep.standard_error = std::sqrt(sd / (M - 1) / M);
  rep.pass = std::abs(rep.difference) <= 5 * rep.standard_error + 1e-15;
  return rep;
}

}  // namespace dmv
