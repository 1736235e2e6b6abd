#include <cmath>
#include <complex>

#include "doctest.h"
#include "dmv/diagnostics.hpp"
#include "dmv/dynamics.hpp"

using namespace dmv;

namespace {
ModelConfig inviscid() {
  ModelConfig cfg;
  cfg.visc = {0, 0};
  return cfg;
}
}  // namespace

TEST_CASE("equilibrium is a fixed point") {
  const Grid g({32, 32});
  ModelConfig cfg;
  cfg.visc = {0.1, 0.05};
  const State s(ScalarField::constant(g, 1.3), VectorField::constant(g, {0, 0}));
  const Rhs f = rhs_deterministic(cfg, s);
  CHECK(max_abs(f.drho) == 0);
  CHECK(max_abs(f.dmom) < 1e-14);
  StepperConfig st;
  st.dt = 0.01;
  const State n = step_em(cfg, st, s, WienerPath(1, 0, 0), 0);
  CHECK((n.rho.values() - s.rho.values()).abs().maxCoeff() == 0);
  CHECK(max_abs(n.mom) < 1e-15);
  CHECK(n.time == doctest::Approx(0.01));
}

TEST_CASE("pure acoustic forcing from a density bump") {
  const Grid g({64});
  ModelConfig cfg = inviscid();
  cfg.mach_eps = 0.5;
  const auto rho = ScalarField::sample(g, [](double x, double) { return 1 + 0.2 * std::sin(x); });
  const State s(rho, VectorField::constant(g, {0, 0}));
  const Rhs f = rhs_deterministic(cfg, s);
  CHECK(max_abs(f.drho) == 0);
  // -(1/eps^2) d/dx (rho^2) = -4 * 2 rho rho_x
  double err = 0;
  for (Index c = 0; c < g.cells(); ++c) {
    const double x = g.position(c)[0];
    const double r = 1 + 0.2 * std::sin(x);
    err = std::max(err, std::abs(f.dmom.values()(c, 0) + 4 * 2 * r * 0.2 * std::cos(x)));
  }
  CHECK(err < 1e-11);
}

TEST_CASE("linear sound speed") {
  const Grid g({256});
  const ModelConfig cfg = inviscid();
  const double A = 1e-4, c0 = std::sqrt(2.0);
  State s(ScalarField::sample(g, [&](double x, double) { return 1 + A * std::sin(x); }),
          VectorField::sample(g, [&](double x, double) { return std::array<double, 2>{A * c0 * std::sin(x), 0}; }));
  StepperConfig st;
  st.dt = 1e-3;
  const WienerPath w(1, 0, 0);
  for (std::uint64_t n = 0; n < 1000; ++n) s = step_em(cfg, st, s, w, n);
  // Phase of the first Fourier mode of rho: A sin(x - c t).
  std::complex<double> hat = 0;
  for (Index c = 0; c < g.cells(); ++c) hat += (s.rho[c] - 1) * std::exp(std::complex<double>(0, -g.position(c)[0]));
  const double phase = std::arg(hat);  // equals -pi/2 - c t
  const double speed = -(phase + M_PI / 2) / s.time;
  CHECK(std::abs(speed - c0) < 0.02 * c0);
}

TEST_CASE("mass conservation over many steps") {
  const Grid g({32, 32});
  ModelConfig cfg;
  cfg.visc = {0.05, 0.02};
  cfg.noise = NoiseModel::affine({0.05, 0.05}, {0.02, 0.0});
  State s(ScalarField::sample(g, [](double x, double y) { return 1 + 0.2 * std::sin(x) * std::cos(y); }),
          VectorField::sample(g, [](double x, double y) {
            return std::array<double, 2>{0.3 * std::sin(y), 0.2 * std::cos(x)};
          }));
  const double m0 = s.mass();
  StepperConfig st;
  st.dt = 2e-3;
  const WienerPath w(3, 0, 2);
  for (std::uint64_t n = 0; n < 1000; ++n) s = step_em(cfg, st, s, w, n);
  CHECK(std::abs(s.mass() - m0) <= 1e-12 * m0);
}

TEST_CASE("noise-only step is a Gaussian random walk") {
  const Grid g({8});
  ModelConfig cfg;
  cfg.noise = NoiseModel::affine({0.3}, {0.0});
  StepperConfig st;
  st.dt = 0.01;
  st.freeze_drift = true;
  const int paths = 2000, steps = 50;
  double s1 = 0, s2 = 0;
  for (int p = 0; p < paths; ++p) {
    State s(ScalarField::constant(g, 1.0), VectorField::constant(g, {0, 0}));
    const WienerPath w(11, std::uint64_t(p), 1);
    for (int n = 0; n < steps; ++n) s = step_em(cfg, st, s, w, std::uint64_t(n));
    CHECK(s.rho.values().isApproxToConstant(1.0));
    const double m = s.mom.values()(3, 0);
    s1 += m;
    s2 += m * m;
  }
  const double var = (s2 - s1 * s1 / paths) / (paths - 1);
  const double expected = steps * 0.01 * 0.09;
  CHECK(std::abs(var - expected) < 5 * expected * std::sqrt(2.0 / (paths - 1)));
}

TEST_CASE("CFL step") {
  const Grid g({64});
  const State s(ScalarField::constant(g, 1.0), VectorField::constant(g, {0, 0}));
  ModelConfig cfg;
  cfg.visc = {1e-3, 0};
  StepperConfig st;
  const double h = kTwoPi / 64;
  CHECK(cfl_dt(cfg, st, s) == doctest::Approx(0.4 * h / std::sqrt(2.0)).epsilon(1e-14));
  ModelConfig half = cfg;
  half.mach_eps = 0.5;
  CHECK(cfl_dt(half, st, s) == doctest::Approx(0.5 * cfl_dt(cfg, st, s)).epsilon(1e-14));
  ModelConfig thick = cfg;
  thick.visc = {10, 0};
  CHECK(cfl_dt(thick, st, s) == doctest::Approx(0.4 * h * h / 40).epsilon(1e-14));

  StepperConfig big;
  big.dt = 1.0;
  try {
    step_em(cfg, big, s, WienerPath(0, 0, 0), 0);
    FAIL("expected a CFL violation");
  } catch (const CflViolation& e) {
    CHECK(e.required_dt == doctest::Approx(h / std::sqrt(2.0)));
  }
}

TEST_CASE("density floor is applied and reported") {
  const Grid g({16});
  ModelConfig cfg;
  cfg.visc = {0.01, 0};
  State s(ScalarField::sample(g, [](double x, double) { return 1e-5 + 0.5 * (1 + std::cos(x)); }),
          VectorField::constant(g, {0, 0}));
  StepperConfig st;
  st.dt = 1e-3;
  st.rho_floor = 1e-4;
  int warnings = 0;
  ScopedWarningSink sink([&](std::string_view) { ++warnings; });
  StepReport rep;
  const State n = step_em(cfg, st, s, WienerPath(0, 0, 0), 0, &rep);
  CHECK(rep.floored_cells > 0);
  CHECK(rep.mass_added > 0);
  CHECK(warnings == 1);
  CHECK(n.rho.values().minCoeff() >= 1e-4);
}

TEST_CASE("viscous energy decay without noise") {
  const Grid g({64});
  ModelConfig cfg;
  cfg.visc = {0.05, 0.05};
  State s(ScalarField::sample(g, [](double x, double) { return 1 + 0.1 * std::cos(x); }),
          VectorField::sample(g, [](double x, double) { return std::array<double, 2>{0.2 * std::sin(2 * x), 0}; }));
  StepperConfig st;
  st.dt = 1e-3;
  const double E0 = state_energy(cfg, s);
  double prev = E0;
  const WienerPath w(0, 0, 0);
  for (std::uint64_t n = 0; n < 500; ++n) {
    s = step_em(cfg, st, s, w, n);
    const double E = state_energy(cfg, s);
    CHECK(E <= prev + 5 * 1e-3 * E0 * 1e-3);
    prev = E;
  }
  CHECK(prev < E0);
}
