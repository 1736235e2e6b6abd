#include "dmv/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "dmv/config.hpp"
#include "dmv/diagnostics.hpp"
#include "dmv/euler_ref.hpp"
#include "dmv/limit_sweep.hpp"
#include "dmv/relative_energy.hpp"

namespace dmv {
namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

State random_state(const Grid& g, std::uint64_t seed, std::uint64_t key) {
  ScalarField::Values r(g.cells());
  VectorField::Values m(g.cells(), g.dim());
  for (Index c = 0; c < g.cells(); ++c) {
    r[c] = 0.2 + 2 * keyed_uniform(seed, key, 0, std::uint64_t(c));
    for (int d = 0; d < g.dim(); ++d) m(c, d) = keyed_normal(seed, key, 1 + d, std::uint64_t(c));
  }
  return {ScalarField(g, std::move(r)), VectorField(g, std::move(m))};
}

VectorField random_solenoidal(const Grid& g, std::uint64_t seed) {
  const auto psi = ScalarField::sample(g, [&](double x, double y) {
    double s = 0;
    for (int k = 1; k <= 4; ++k)
      for (int l = 0; l <= 4; ++l)
        s += keyed_normal(seed, k, l, 7) / (k * k + l * l) * std::cos(k * x + l * y + kTwoPi * keyed_uniform(seed, k, l, 8));
    return s;
  });
  return skew_gradient(psi);
}

class Suite {
 public:
  void run(const std::string& module, const std::string& name, const std::function<std::string(bool&)>& body) {
    CheckResult r{module, name, false, ""};
    try {
      bool ok = false;
      r.detail = body(ok);
      r.pass = ok;
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  std::vector<CheckResult> results;
};

}  // namespace

Observable energy_observable(const PressureLaw& law) {
  return {"energy", [law](double rho, const SmallVector& m) { return 0.5 * m.squaredNorm() / rho + potential_delta(law, rho); },
          law.gamma, 2 * law.gamma / (law.gamma + 1)};
}

Observable negated_energy_observable(const PressureLaw& law) {
  Observable F = energy_observable(law);
  F.name = "negated energy";
  F.eval = [e = F.eval](double rho, const SmallVector& m) { return -e(rho, m); };
  return F;
}

Index jensen_violations(const Observable& F, int measures, std::uint64_t seed) {
  int cells = 8;
  while (cells < measures) cells *= 2;
  const Grid g({cells});
  const State a = random_state(g, seed, 1), b = random_state(g, seed, 2);
  const EmpiricalYoungMeasure ym(std::vector<const State*>{&a, &b});
  const ScalarField avg = expect(ym, F);
  const ScalarField rho = ym.mean_density();
  const VectorField m = ym.mean_momentum();
  Index bad = 0;
  for (Index c = 0; c < g.cells(); ++c) {
    SmallVector mc(1);
    mc[0] = m.values()(c, 0);
    const double lhs = F.eval(rho[c], mc);
    if (lhs > avg[c] + 1e-12 * std::max(1.0, std::abs(avg[c]))) ++bad;
  }
  return bad;
}

std::vector<CheckResult> run_invariant_suite(const VerifyOptions& opt) {
  Suite s;
  const PressureLaw& law = opt.law;
  const std::uint64_t seed = opt.seed;

  s.run("constitutive", "rho P' - P = p and p = (gamma - 1) P + a rho", [&](bool& ok) {
    double worst = 0;
    for (double gamma : {1.4, 2.0, 3.0}) {
      const PressureLaw l{1.0, gamma, 0.0, 6.0};
      for (int i = 0; i <= 200; ++i) {
        const double rho = 0.1 * std::pow(100.0, i / 200.0);
        const double p = pressure(l, rho), P = potential(l, rho);
        worst = std::max(worst, std::abs(rho * potential_delta_derivative(l, rho, 1) - P - p) / std::abs(p));
        worst = std::max(worst, std::abs((gamma - 1) * P + l.a * rho - p) / std::abs(p));
      }
    }
    ok = worst <= 1e-8;
    return "max rel err " + sci(worst);
  });
  s.run("constitutive", "H >= 0 with two-regime lower bound", [&](bool& ok) {
    double minH = 0;
    for (int i = 0; i <= 100; ++i)
      for (int j = 1; j <= 50; ++j) minH = std::min(minH, relative_H(law, 4.0 * i / 100, 0.1 + 0.06 * j));
    const auto audit = relative_H_bound_audit(law, 0.5);
    ok = minH >= -1e-12 && audit.c_box > 0 && audit.c_far > 0;
    return "min H " + sci(minH) + ", c_box " + sci(audit.c_box) + ", c_far " + sci(audit.c_far);
  });

  s.run("torus_field", "Helmholtz projection", [&](bool& ok) {
    const Grid g({64, 64});
    const auto phi = ScalarField::sample(g, [](double x, double y) { return std::sin(2 * x) * std::cos(3 * y) + std::cos(x + y); });
    const VectorField grad = gradient(phi);
    const VectorField sol = random_solenoidal(g, seed + 1);
    const VectorField mix(g, grad.values() + sol.values());
    const VectorField P = helmholtz_project(mix);
    const double e1 = max_abs(helmholtz_project(grad));
    const double e2 = (helmholtz_project(sol).values() - sol.values()).abs().maxCoeff();
    const double e3 = (helmholtz_project(P).values() - P.values()).abs().maxCoeff();
    ok = std::max({e1, e2, e3}) <= 1e-10;
    return "gradients " + sci(e1) + ", solenoidal " + sci(e2) + ", idempotence " + sci(e3);
  });
  s.run("torus_field", "Laplacian inverse on zero-mean data", [&](bool& ok) {
    const Grid g({32, 32});
    const auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(x) * std::sin(2 * y) + 0.5; });
    double removed = 0;
    int warnings = 0;
    ScalarField u = ScalarField::zero(g);
    {
      ScopedWarningSink sink([&](std::string_view) { ++warnings; });
      u = laplacian(inverse_laplacian(f, &removed));
    }
    const double err = (u.values() - (f.values() - 0.5)).abs().maxCoeff();
    ok = err < 1e-12 && std::abs(removed - 0.5) < 1e-12 && warnings == 1;
    return "err " + sci(err);
  });

  s.run("noise", "aggregated Wiener paths agree on the coarse grid", [&](bool& ok) {
    const WienerPath fine(seed, 3, 2, 1), coarse(seed, 3, 2, 4);
    double err = 0;
    for (std::uint64_t n = 0; n < 16; ++n) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
      for (std::uint64_t j = 0; j < 4; ++j) sum += fine.sample_increments(4 * n + j, 0.01);
      err = std::max(err, (sum - coarse.sample_increments(n, 0.04)).cwiseAbs().maxCoeff());
    }
    ok = err < 1e-14;
    return "max diff " + sci(err);
  });
  s.run("noise", "G(x, 0, 0) = 0", [&](bool& ok) {
    const NoiseModel nm = NoiseModel::affine({0.1, 0.3}, {0.05, -0.2});
    double worst = 0;
    for (int k = 0; k < nm.modes(); ++k) worst = std::max(worst, nm.at(k, {0.3, 1.1}, 0.0, SmallVector::Zero(2)).norm());
    ok = worst == 0;
    return "max |G| " + sci(worst);
  });

  s.run("dynamics", "mass conservation and equilibrium", [&](bool& ok) {
    ModelConfig model;
    model.visc = {0.05, 0.05};
    model.noise = NoiseModel::affine({0.1}, {0.05});
    const Grid g({32, 32});
    StepperConfig st;
    st.dt = 2e-3;
    State s0(ScalarField::sample(g, [](double x, double y) { return 1 + 0.2 * std::sin(x) * std::cos(y); }), VectorField::zero(g));
    const double m0 = s0.mass();
    const WienerPath w(seed, 0, 1);
    State s = s0;
    for (std::uint64_t n = 0; n < 100; ++n) s = step_em(model, st, s, w, n);
    const double drift = std::abs(s.mass() - m0) / m0;
    ModelConfig quiet = model;
    quiet.noise = NoiseModel::none();
    const State rest(ScalarField::constant(g, 1.0), VectorField::zero(g));
    const State after = step_em(quiet, st, rest, Eigen::VectorXd(0), 2e-3);
    const double still = (after.rho.values() - 1).abs().maxCoeff() + after.mom.values().abs().maxCoeff();
    ok = drift <= 1e-12 && still <= 1e-14;
    return "mass drift " + sci(drift) + ", equilibrium change " + sci(still);
  });

  s.run("ensemble_ym", "<nu; 1> = 1", [&](bool& ok) {
    const Grid g({16});
    std::vector<State> st;
    for (int i = 0; i < 7; ++i) st.push_back(random_state(g, seed, 10 + i));
    const double err = (build_ym(st, 0, 7).total_mass().values() - 1).abs().maxCoeff();
    ok = err < 1e-14;
    return "err " + sci(err);
  });
  s.run("ensemble_ym", "Jensen inequality on 1000 two-atom measures", [&](bool& ok) {
    const Observable F = opt.jensen ? *opt.jensen : energy_observable(law);
    const Index bad = jensen_violations(F, 1000, seed);
    ok = bad == 0;
    return F.name + ": " + std::to_string(bad) + " violations";
  });
  s.run("ensemble_ym", "momentum defect trace and domination", [&](bool& ok) {
    const Grid g({8, 8});
    std::vector<State> st;
    for (int i = 0; i < 3; ++i) st.push_back(random_state(g, seed, 30 + i));
    const auto ym = build_ym(st, 0, 3);
    const auto md = momentum_defect(ym, law);
    const auto dd = dissipation_defect(ym, law);
    double worst = 0;
    const int n = g.dim();
    for (Index c = 0; c < g.cells(); ++c) {
      double kin = 0, tr = 0;
      for (int a = 0; a < n; ++a) {
        kin += md.kinetic.values()(c, TensorField::slot(n, a, a));
        tr += md.total().values()(c, TensorField::slot(n, a, a));
      }
      // trace = 2 kinetic + N (gamma - 1) potential parts of the energy defect.
      const double pot = dd.density[c] - 0.5 * kin;
      worst = std::max(worst, std::abs(tr - kin - n * (law.gamma - 1) * pot) / std::max(1.0, std::abs(tr)));
    }
    const auto dom = defect_domination_audit(ym, law, domination_constant(law, n));
    ok = worst <= 1e-12 && dom.pass();
    return "trace err " + sci(worst) + ", max ratio " + sci(dom.max_ratio) + " / " + sci(dom.bound);
  });
  s.run("ensemble_ym", "Young measure export round trip", [&](bool& ok) {
    const Grid g({8});
    std::vector<State> st{random_state(g, seed, 40), random_state(g, seed, 41)};
    const auto snap = export_ym(build_ym(st, 0, 2), 0.5);
    const auto tmp = std::filesystem::temp_directory_path() / ("dmv_verify_" + std::to_string(seed) + ".bin");
    write_snapshot(tmp, snap);
    const auto back = read_snapshot(tmp);
    std::filesystem::remove(tmp);
    ok = back.data.cols() == 4 && (back.data - snap.data).abs().maxCoeff() == 0 && back.time == 0.5;
    return "components " + std::to_string(back.data.cols());
  });

  s.run("energy_ledger", "shear decay and Poincare ratio", [&](bool& ok) {
    // A solenoidal shear at uniform density decays by viscosity alone.
    EnsembleSpec spec;
    spec.model.visc = {0.05, 0.05};
    spec.grid = Grid({16, 16});
    spec.stepper.dt = 5e-3;
    spec.horizon = 0.5;
    spec.sample_every = 10;
    spec.replicas = 3;
    spec.initial = [&](const Grid& g, int, int r) {
      return State(ScalarField::constant(g, 1.0), VectorField::sample(g, [&](double, double y) {
                     return std::array<double, 2>{0.1 * (r + 1) * std::sin(y), 0};
                   }));
    };
    const auto runs = run_ensemble(spec);
    const auto& rows = runs[0].ledger.rows;
    bool decreasing = true;
    double worst = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      decreasing = decreasing && rows[i].E < rows[i - 1].E;
      worst = std::max(worst, energy_residual(runs[0].ledger, 0, i));
    }
    const auto ym = build_ym(runs[0].final_states, 0, 3);
    const auto pr = poincare_ratio(ym, dissipation_defect(ym, spec.model.effective_law()).total, 1e3);
    ok = decreasing && worst <= 1e-3 && pr.pass;
    return std::string(decreasing ? "" : "energy increased, ") + (pr.pass ? "" : "Poincare failed, ") +
           "max residual " + sci(worst) + ", Poincare ratio " + sci(pr.ratio);
  });

  s.run("relative_energy", "regrouped form, nonnegativity and Dirac zero", [&](bool& ok) {
    const Grid g({16, 16});
    std::vector<State> st;
    for (int i = 0; i < 3; ++i) st.push_back(random_state(g, seed, 50 + i));
    const auto ym = build_ym(st, 0, 3);
    const State ref = random_state(g, seed, 60);
    const VectorField U = ref.velocity();
    double direct = 0;
    for (const State& a : st)
      for (Index c = 0; c < g.cells(); ++c) {
        const double rho = a.rho[c], r = ref.rho[c];
        const Eigen::Vector2d m(a.mom.values()(c, 0), a.mom.values()(c, 1)), u(U.values()(c, 0), U.values()(c, 1));
        direct += (0.5 * m.squaredNorm() / rho + potential_delta(law, rho) - m.dot(u) + 0.5 * rho * u.squaredNorm() -
                   rho * potential_delta_derivative(law, r, 1) + r * potential_delta_derivative(law, r, 1) -
                   potential_delta(law, r)) /
                  3;
      }
    direct *= g.cell_volume();
    const double E = relative_energy(ym, 0, ref.rho, U, law);
    const State* one = &st[0];
    const double zero = relative_energy(EmpiricalYoungMeasure({one}), 0, st[0].rho, st[0].velocity(), law);
    ok = std::abs(E - direct) <= 1e-10 * std::max(1.0, std::abs(direct)) && E >= 0 && std::abs(zero) < 1e-10;
    return "difference " + sci(std::abs(E - direct)) + ", E " + sci(E);
  });
  s.run("relative_energy", "Gronwall check", [&](bool& ok) {
    const std::vector<double> t{0, 0.5, 1};
    const double r0 = gronwall_check(t, {1, std::exp(0.5), std::exp(1.0)}, 1, 0);
    const double r1 = gronwall_check(t, {1, 3, 1}, 1, 0);
    ok = r0 <= 1e-12 && r1 > 0;
    return "exact " + sci(r0) + ", violated " + sci(r1);
  });

  s.run("euler_ref", "Taylor-Green stays steady and solenoidal", [&](bool& ok) {
    const Grid g({32, 32});
    EulerState e(taylor_green(g));
    const VectorField v0 = e.v;
    for (int n = 0; n < 20; ++n) e = step_em_euler(e, NoiseModel::none(), Eigen::VectorXd(0), 1e-2);
    const double err = (e.v.values() - v0.values()).abs().maxCoeff();
    const double div = max_abs(divergence(e.v));
    ok = err < 1e-10 && div < 1e-10;
    return "drift " + sci(err) + ", divergence " + sci(div);
  });

  s.run("limit_sweep", "rate fit and data audit", [&](bool& ok) {
    const std::vector<double> eps{1, 0.5, 0.25};
    const auto f1 = fit_rate(eps, eps);
    const auto f2 = fit_rate(eps, {1, 0.25, 0.0625});
    const Grid g({16, 16});
    const State d = well_prepared_data(0.5, taylor_green(g), 0.5, low_mode_perturbation(g, seed, 0, 0));
    const double dev = ((d.rho.values() - 1).abs() / 0.5).maxCoeff();
    ok = std::abs(f1.slope - 1) < 1e-12 && std::abs(f2.slope - 2) < 1e-12 && f1.monotone && dev <= 0.5;
    return "slopes " + sci(f1.slope) + ", " + sci(f2.slope);
  });

  s.run("cli_io", "config round trip", [&](bool& ok) {
    Config c;
    c.set("model.gamma", "1.4");
    const Config back = Config::parse(c.resolved());
    bool rejected = false;
    try {
      Config::parse("model.nonsense = 1");
    } catch (const ConfigError&) {
      rejected = true;
    }
    ok = back.resolved() == c.resolved() && rejected;
    return rejected ? "unknown keys rejected" : "unknown key accepted";
  });
  if (opt.snapshot) {
    s.run("cli_io", "snapshot load", [&](bool& ok) {
      const Snapshot snap = read_snapshot(*opt.snapshot);
      ok = true;
      return "grid " + snap.grid.describe() + ", " + std::to_string(snap.data.cols()) + " components";
    });
  }
  return s.results;
}

std::string format_check_table(const std::vector<CheckResult>& results) {
  std::size_t wm = 6, wn = 5;
  for (const auto& r : results) {
    wm = std::max(wm, r.module.size());
    wn = std::max(wn, r.name.size());
  }
  std::ostringstream os;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
    os << a << std::string(wm - a.size() + 2, ' ') << b << std::string(wn - b.size() + 2, ' ') << c << "  " << d << '\n';
  };
  row("module", "check", "result", "detail");
  for (const auto& r : results) row(r.module, r.name, r.pass ? "PASS  " : "FAIL  ", r.detail);
  return os.str();
}

}  // namespace dmv
