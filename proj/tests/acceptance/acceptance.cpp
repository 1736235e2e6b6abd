// Acceptance criteria 1-9; prints one line per criterion and exits nonzero
// if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <string>

#include "dmv/euler_ref.hpp"
#include "dmv/limit_sweep.hpp"
#include "dmv/relative_energy.hpp"
#include "dmv/simulation.hpp"
#include "dmv/verify.hpp"

using namespace dmv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }

State wave_1d(const Grid& g, double rho_amp, double m_amp) {
  return {ScalarField::sample(g, [&](double x, double) { return 1 + rho_amp * std::sin(x); }),
          VectorField::sample(g, [&](double x, double) { return std::array<double, 2>{m_amp * std::cos(x), 0}; })};
}

State random_state(const Grid& g, std::uint64_t key) {
  ScalarField::Values r(g.cells());
  VectorField::Values m(g.cells(), g.dim());
  for (Index c = 0; c < g.cells(); ++c) {
    r[c] = 0.2 + 2 * keyed_uniform(99, key, 0, std::uint64_t(c));
    for (int d = 0; d < g.dim(); ++d) m(c, d) = keyed_normal(99, key, 1 + d, std::uint64_t(c));
  }
  return {ScalarField(g, std::move(r)), VectorField(g, std::move(m))};
}

Outcome criterion1() {
  double worst = 0;
  bool bound = true;
  std::string audit;
  for (double gamma : {1.4, 2.0, 3.0}) {
    const PressureLaw law{1.0, gamma, 0.0, 6.0};
    for (int i = 0; i <= 1000; ++i) {
      const double rho = 0.1 * std::pow(100.0, i / 1000.0);
      const double p = pressure(law, rho), P = potential(law, rho);
      const double dP = potential_delta_derivative(law, rho, 1);
      worst = std::max(worst, std::abs(rho * dP - P - p) / std::abs(p));
      worst = std::max(worst, std::abs((gamma - 1) * P + law.a * rho - p) / std::abs(p));
    }
    // On the box H is a second-order Taylor remainder, so H / |rho - r|^2 >= min P'' / 2.
    const double alpha = 0.5;
    double min_p2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i)
      min_p2 = std::min(min_p2, potential_delta_derivative(law, alpha + (1 / alpha - alpha) * i / 200.0, 2));
    const auto a = relative_H_bound_audit(law, alpha);
    const bool ok = a.min_H >= 0 && a.c_box >= 0.5 * min_p2 * (1 - 1e-9) && a.c_far > 0;
    bound = bound && ok;
    audit += fmt(" gamma=%.1f", gamma) + " c_box=" + sci(a.c_box) + " c_far=" + sci(a.c_far);
  }
  return {worst <= 1e-8 && bound, "identity rel err " + sci(worst) + ";" + audit};
}

Outcome criterion2() {
  const Grid g({64, 64});
  const auto phi = ScalarField::sample(g, [](double x, double y) { return std::sin(2 * x) * std::cos(3 * y) + std::cos(x + y); });
  const auto psi = ScalarField::sample(g, [](double x, double y) { return std::cos(x) * std::sin(4 * y) - 0.3 * std::sin(5 * x + y); });
  const VectorField grad = gradient(phi);
  const VectorField sol = skew_gradient(psi);
  const VectorField P = helmholtz_project(VectorField(g, grad.values() + sol.values()));
  const double e1 = max_abs(helmholtz_project(grad));
  const double e2 = (helmholtz_project(sol).values() - sol.values()).abs().maxCoeff();
  const double e3 = (helmholtz_project(P).values() - P.values()).abs().maxCoeff();
  return {std::max({e1, e2, e3}) <= 1e-10,
          "gradient " + sci(e1) + ", solenoidal " + sci(e2) + ", idempotence " + sci(e3)};
}

Outcome criterion3() {
  auto run = [](double dt, int every) {
    EnsembleSpec spec;
    spec.model.visc = {1e-2, 1e-2};
    spec.grid = Grid({256});
    spec.stepper.dt = dt;
    spec.horizon = 1;
    spec.sample_every = every;
    spec.initial = [](const Grid& g, int, int) { return wave_1d(g, 0.2, 0.1); };
    return run_ensemble(spec)[0];
  };
  const PathRun a = run(2e-3, 1), b = run(1e-3, 2);
  const Grid g({256});
  const double m0 = wave_1d(g, 0.2, 0.1).mass();
  double mass_err = 0;
  for (const PathRun* r : {&a, &b}) mass_err = std::max(mass_err, std::abs(r->final_states[0].mass() - m0) / m0);
  // The explicit step adds an O(dt) energy bias; monotonicity is tested on the
  // Richardson extrapolation 2 E(dt/2) - E(dt) at the shared sample times.
  const auto& ra = a.ledger.rows;
  const auto& rb = b.ledger.rows;
  bool decreasing = ra.size() == rb.size();
  int raw_increases = 0;
  for (std::size_t i = 1; decreasing && i < ra.size(); ++i) {
    decreasing = 2 * rb[i].E - ra[i].E <= 2 * rb[i - 1].E - ra[i - 1].E;
    raw_increases += ra[i].E > ra[i - 1].E;
  }
  const double ratio = ra.back().residual / rb.back().residual;
  return {mass_err <= 1e-12 && decreasing && ratio >= 1.7 && ratio <= 2.3,
          "mass err " + sci(mass_err) + (decreasing ? ", extrapolated E non-increasing" : ", extrapolated E increased") +
              " (raw increases " + std::to_string(raw_increases) + " of " + std::to_string(ra.size() - 1) +
              "), residual " + sci(ra.back().residual) + " -> " + sci(rb.back().residual) + ", ratio " + fmt("%.3f", ratio)};
}

Outcome criterion4() {
  // Coarse and fine runs share Wiener paths; their difference estimates the
  // first-order time-discretization bias, removed by Richardson extrapolation.
  auto run = [](double dt, int aggregation) {
    EnsembleSpec spec;
    spec.model.visc = {1e-2, 1e-2};
    spec.model.noise = NoiseModel::affine({0.1}, {0.05});
    spec.grid = Grid({64});
    spec.stepper.dt = dt;
    spec.horizon = 1;
    spec.paths = 256;
    spec.aggregation = aggregation;
    spec.seed = 17;
    spec.sample_every = int(std::lround(0.1 / dt));
    spec.initial = [](const Grid& g, int, int) { return wave_1d(g, 0.2, 0.3); };
    return run_ensemble(spec);
  };
  const auto coarse = run(2e-3, 2), fine = run(1e-3, 1);
  const std::size_t rows = fine[0].ledger.rows.size();
  const double n = double(fine.size());
  bool ok = rows == coarse[0].ledger.rows.size();
  double worst_res = -1e300, worst_mart = 0, bias = 0;
  for (std::size_t i = 1; ok && i < rows; ++i) {
    double s = 0, s2 = 0, d = 0, m = 0, m2 = 0;
    for (std::size_t p = 0; p < fine.size(); ++p) {
      const double rf = fine[p].ledger.rows[i].residual, rc = coarse[p].ledger.rows[i].residual;
      const double r0 = 2 * rf - rc;
      s += r0;
      s2 += r0 * r0;
      d += rc - rf;
      const double mf = fine[p].ledger.rows[i].martingale;
      m += mf;
      m2 += mf * mf;
    }
    const double mean = s / n, se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1));
    const double mm = m / n, mse = std::sqrt(std::max(0.0, m2 / n - mm * mm) / (n - 1));
    worst_res = std::max(worst_res, mean / se);
    worst_mart = std::max(worst_mart, std::abs(mm) / mse);
    bias = std::max(bias, d / n);
    ok = ok && mean <= 5 * se && std::abs(mm) <= 5 * mse;
  }
  return {ok, "max extrapolated residual / SE " + fmt("%.2f", worst_res) + ", max |martingale| / SE " +
                  fmt("%.2f", worst_mart) + ", fitted bias " + sci(bias)};
}

Outcome criterion5() {
  bool ok = true;
  std::string detail;
  for (double gamma : {1.4, 2.0}) {
    const PressureLaw law{1.0, gamma, 0.0, 6.0};
    const Grid g({8, 8});
    std::vector<State> st;
    for (int i = 0; i < 3; ++i) st.push_back(random_state(g, 10 * std::uint64_t(gamma * 10) + i));
    const auto ym = build_ym(st, 0, 3);
    const double mass_err = (ym.total_mass().values() - 1).abs().maxCoeff();
    const Index bad = jensen_violations(energy_observable(law), 1000, 5);
    const auto md = momentum_defect(ym, law);
    const auto dd = dissipation_defect(ym, law);
    const int n = g.dim();
    double trace_err = 0;
    for (Index c = 0; c < g.cells(); ++c) {
      double kin = 0, tr = 0;
      for (int a = 0; a < n; ++a) {
        kin += md.kinetic.values()(c, TensorField::slot(n, a, a));
        tr += md.total().values()(c, TensorField::slot(n, a, a));
      }
      const double pot = dd.density[c] - 0.5 * kin;
      trace_err = std::max(trace_err, std::abs(tr - kin - n * (gamma - 1) * pot) / std::max(1.0, std::abs(tr)));
    }
    const auto dom = defect_domination_audit(ym, law, std::max(2.0, n * (gamma - 1)));
    ok = ok && mass_err < 1e-14 && bad == 0 && trace_err <= 1e-12 && dom.pass();
    detail += fmt("gamma=%.1f", gamma) + " mass " + sci(mass_err) + " jensen " + std::to_string(bad) + " trace " +
              sci(trace_err) + " domination " + sci(dom.max_ratio) + "/" + sci(dom.bound) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome criterion6() {
  CrossVariationConfig cfg;
  cfg.model.visc = {0.05, 0.05};
  cfg.model.noise = NoiseModel::affine({0.1, 0.05}, {0.05, 0.0});
  cfg.grid = Grid({16});
  cfg.initial = [](const Grid& g) { return wave_1d(g, 0.2, 0.3); };
  cfg.dt = 1e-2;
  cfg.horizon = 1;
  cfg.paths = 10000;
  cfg.seed = 6;
  cfg.f.coupling = Eigen::Vector2d(1, 0);
  const auto r = cross_variation_audit(cfg);
  return {r.pass, "estimate " + sci(r.estimate) + ", expected " + sci(r.expected) + ", difference / SE " +
                      fmt("%.2f", r.difference / r.standard_error)};
}

WeakStrongConfig ws_config(int cells, double dt) {
  WeakStrongConfig cfg;
  cfg.model.noise = NoiseModel::affine({0.2, 0.1}, {0.1, 0.0});
  cfg.model.visc = {0.05, 0.05};
  cfg.grid = Grid({cells});
  cfg.dt = dt;
  cfg.horizon = 0.5;
  cfg.sample_every = int(std::lround(0.1 / dt));
  cfg.paths = 16;
  cfg.seed = 42;
  cfg.reference_initial = [](const Grid& g) { return wave_1d(g, 0.2, 0.3); };
  return cfg;
}

Outcome criterion7() {
  WeakStrongConfig self = ws_config(32, 1e-2);
  self.self_comparison = true;
  self.replicas = 2;
  const auto s = weak_strong_experiment(self);
  const double self_max = *std::max_element(s.Emv_mean.begin(), s.Emv_mean.end());

  const auto coarse = weak_strong_experiment(ws_config(16, 1e-2));
  const auto fine = weak_strong_experiment(ws_config(32, 5e-3));
  const double ratio = coarse.Emv_mean.back() / fine.Emv_mean.back();

  auto perturbed = [](int paths) {
    WeakStrongConfig cfg = ws_config(32, 5e-3);
    cfg.paths = paths;
    cfg.bias = 1e-6;
    cfg.member_initial = [](const Grid& g, int, int) {
      return State(ScalarField::sample(g, [](double x, double) { return 1 + 0.2 * std::sin(x) + 0.05 * std::cos(3 * x); }),
                   VectorField::sample(g, [](double x, double) {
                     return std::array<double, 2>{0.3 * std::cos(x) + 0.05 * std::sin(2 * x), 0};
                   }));
    };
    return weak_strong_experiment(cfg);
  };
  const double c1 = perturbed(128).gronwall_c, c2 = perturbed(256).gronwall_c;
  const bool stable = std::abs(c2 - c1) <= 0.3 * std::abs(c1);
  return {self_max < 1e-12 && ratio >= 1.5 && stable,
          "self " + sci(self_max) + ", E(T) " + sci(coarse.Emv_mean.back()) + " -> " + sci(fine.Emv_mean.back()) +
              " ratio " + fmt("%.2f", ratio) + ", c " + fmt("%.4f", c1) + " -> " + fmt("%.4f", c2)};
}

Outcome criterion8() {
  const SweepConfig cfg;
  const auto rep = run_sweep(cfg);
  std::string values;
  for (const auto& p : rep.points) values += " " + sci(p.final_mean());
  return {rep.pass(), "E(T) per eps" + values + ", slope " + fmt("%.3f", rep.fit.slope) +
                          (rep.fit.monotone ? ", monotone" : ", not monotone") +
                          (rep.D_nonincreasing ? ", D non-increasing" : ", D increasing")};
}

Outcome criterion9() {
  auto outputs = [](int threads) {
    EnsembleSpec spec;
    spec.model.visc = {0.05, 0.05};
    spec.model.noise = NoiseModel::affine({0.1, 0.05}, {0.05, 0.0});
    spec.grid = Grid({16, 16});
    spec.stepper.dt = 5e-3;
    spec.horizon = 0.25;
    spec.sample_every = 10;
    spec.paths = 16;
    spec.replicas = 2;
    spec.seed = 9;
    spec.threads = threads;
    spec.initial = [](const Grid& g, int path, int replica) {
      const VectorField v = taylor_green(g);
      return well_prepared_data(0.5, v, 0.5, low_mode_perturbation(g, 9, path, replica));
    };
    std::vector<EnergyLedger> ls;
    for (const auto& r : run_ensemble(spec)) ls.push_back(r.ledger);
    std::string out = ledger_stats_csv(ledger_stats(ls));

    WeakStrongConfig ws = ws_config(16, 1e-2);
    ws.threads = threads;
    out += relative_energy_csv(weak_strong_experiment(ws));

    SweepConfig sw;
    sw.eps = {1, 0.5};
    sw.grid = Grid({16, 16});
    sw.horizon = 0.1;
    sw.samples = 2;
    sw.paths = 4;
    sw.replicas = 2;
    sw.threads = threads;
    out += sweep_csv(run_sweep(sw));
    return out;
  };
  const std::string a = outputs(1), b = outputs(2), c = outputs(8);
  return {a == b && a == c, std::to_string(a.size()) + " bytes, 2 workers " + (a == b ? "identical" : "differ") +
                                ", 8 workers " + (a == c ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{{1, 1, criterion1},  {2, 1, criterion2},   {3, 10, criterion3},
                                   {4, 120, criterion4}, {5, 5, criterion5},  {6, 60, criterion6},
                                   {7, 300, criterion7}, {8, 900, criterion8}, {9, 60, criterion9}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %d: %s (%s; %.2f s of %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
