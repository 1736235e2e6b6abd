#include <cmath>

#include "doctest.h"
#include "dmv/euler_ref.hpp"

using namespace dmv;

namespace {
VectorField taylor_green(const Grid& g) {
  return VectorField::sample(g, [](double x, double y) {
    return std::array<double, 2>{std::sin(x) * std::cos(y), -std::cos(x) * std::sin(y)};
  });
}

VectorField random_solenoidal(const Grid& g, std::uint64_t seed) {
  const auto psi = ScalarField::sample(g, [&](double x, double y) {
    double s = 0;
    for (int k = 1; k <= 4; ++k)
      for (int l = 0; l <= 4; ++l)
        s += keyed_normal(seed, k, l, 0) / (k * k + l * l) * std::cos(k * x + l * y + kTwoPi * keyed_uniform(seed, k, l, 1));
    return s;
  });
  return skew_gradient(psi);
}
}  // namespace

TEST_CASE("pressure from projection") {
  const Grid g({32, 32});
  CHECK(max_abs(pressure_from_projection(VectorField::constant(g, {0.3, -1.0}))) < 1e-14);

  const auto pi = pressure_from_projection(taylor_green(g));
  const auto exact = ScalarField::sample(g, [](double x, double y) { return (std::cos(2 * x) + std::cos(2 * y)) / 4; });
  CHECK((pi.values() - exact.values()).abs().maxCoeff() < 1e-12);

  for (std::uint64_t seed : {1, 2, 3}) {
    const auto v = random_solenoidal(g, seed);
    const auto c = convective_term(v);
    const auto lhs = gradient(pressure_from_projection(v));
    const auto rhs = helmholtz_project(c);
    CHECK((lhs.values() - (rhs.values() - c.values())).abs().maxCoeff() < 1e-10);
    CHECK(std::abs(mean(pressure_from_projection(v))) < 1e-14);
  }
}

TEST_CASE("Taylor-Green is a steady Euler flow") {
  const Grid g({128, 128});
  EulerState s(taylor_green(g));
  const auto v0 = s.v.values();
  const NoiseModel none;
  const double dt = 0.01;
  for (std::uint64_t n = 0; n < 100; ++n) s = step_em_euler(s, none, Eigen::VectorXd(), dt);
  CHECK(s.time == doctest::Approx(1.0));
  CHECK((s.v.values() - v0).abs().maxCoeff() < 1e-6);
  CHECK(max_abs(divergence(s.v)) < 1e-10);
}

TEST_CASE("zero velocity stays at rest") {
  const Grid g({16, 16});
  EulerState s(VectorField::constant(g, {0, 0}));
  for (std::uint64_t n = 0; n < 10; ++n) s = step_em_euler(s, NoiseModel(), Eigen::VectorXd(), 0.1);
  CHECK(max_abs(s.v) == 0);
}

TEST_CASE("constant forcing gives a random spatially constant drift") {
  const Grid g({16, 16});
  const auto noise = NoiseModel::affine({0.4}, {0.0});
  const int paths = 2000, steps = 20;
  const double dt = 0.05;
  double s1 = 0, s2 = 0;
  for (int p = 0; p < paths; ++p) {
    EulerState s(VectorField::constant(g, {0, 0}));
    const WienerPath w(5, std::uint64_t(p), 1);
    for (int n = 0; n < steps; ++n) s = step_em_euler(s, noise, w, std::uint64_t(n), dt);
    CHECK((s.v.values().col(0) - s.v.values()(0, 0)).abs().maxCoeff() < 1e-12);
    const double x = s.v.values()(0, 0);
    s1 += x;
    s2 += x * x;
  }
  const double var = (s2 - s1 * s1 / paths) / (paths - 1);
  const double expected = 0.16 * steps * dt;
  CHECK(std::abs(var - expected) < 5 * expected * std::sqrt(2.0 / (paths - 1)));
}

TEST_CASE("kinetic energy drift halves with dt") {
  const Grid g({32, 32});
  const auto v0 = random_solenoidal(g, 11);
  auto drift = [&](double dt) {
    EulerState s(v0);
    const double e0 = 0.5 * integrate(ScalarField(g, v0.values().square().rowwise().sum()));
    const int steps = static_cast<int>(std::lround(0.5 / dt));
    for (int n = 0; n < steps; ++n) s = step_em_euler(s, NoiseModel(), Eigen::VectorXd(), dt);
    return 0.5 * integrate(ScalarField(g, s.v.values().square().rowwise().sum())) - e0;
  };
  const double d1 = drift(0.01), d2 = drift(0.005);
  CHECK(d1 > 0);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("noise must keep the field solenoidal") {
  GeneralMode m;
  m.coefficient = [](const Point&, double, const SmallVector& q) { return SmallVector(q); };
  m.lipschitz = 1;
  CHECK_THROWS_AS(require_solenoidal_noise(NoiseModel::general({m})), InvalidArgument);
  CHECK_NOTHROW(require_solenoidal_noise(NoiseModel::affine({1}, {1})));
  const Grid g({16, 16});
  const auto x = VectorField::sample(g, [](double x, double) { return std::array<double, 2>{std::sin(x), 0}; });
  CHECK_THROWS_AS(EulerState{x}, InvalidArgument);
}

TEST_CASE("stopping time") {
  const Grid g({32, 32});
  const double norm = gradient_sup_norm(taylor_green(g));
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> t{0, 0.5, 1.0}, n{norm, norm, norm};
  CHECK(stopping_time_tau_M(t, n, 0.5, 1.0) == 0);
  CHECK(stopping_time_tau_M(t, n, 2.0, 1.0) == 1.0);
  CHECK(stopping_time_tau_M(t, n, 1e300, 1.0) == 1.0);
  CHECK(stopping_time_tau_M(t, n, 0.0, 1.0) == 0);
  CHECK(stopping_time_tau_M({0.0, 0.2, 0.4}, {0.1, 3.0, 5.0}, 2.0, 1.0) == 0.2);
}
