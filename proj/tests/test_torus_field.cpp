#include <cmath>

#include "doctest.h"
#include "dmv/diagnostics.hpp"
#include "dmv/torus_field.hpp"

using namespace dmv;

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(Grid({4}), InvalidArgument);
  CHECK_THROWS_AS(Grid({12}), InvalidArgument);
  CHECK_THROWS_AS(Grid({8, 8, 8}), InvalidArgument);
  const Grid g({16, 32});
  CHECK(g.cells() == 512);
  CHECK(g.cell_volume() == doctest::Approx(kTwoPi * kTwoPi / 512).epsilon(1e-14));
  CHECK(g.min_spacing() == doctest::Approx(kTwoPi / 32));
}

TEST_CASE("fields reject non-finite values and shape mismatches") {
  const Grid g({8});
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(8);
  v[3] = NAN;
  CHECK_THROWS_AS(ScalarField(g, v), NonFiniteValue);
  CHECK_THROWS_AS(ScalarField(g, Eigen::ArrayXd::Zero(7)), InvalidArgument);
}

TEST_CASE("gradient of resolved modes") {
  const Grid g1({32});
  const auto f = ScalarField::sample(g1, [](double x, double) { return std::sin(x); });
  const auto df = gradient(f);
  const auto exact = ScalarField::sample(g1, [](double x, double) { return std::cos(x); });
  CHECK((df.values().col(0) - exact.values()).abs().maxCoeff() < 1e-13);
  CHECK(max_abs(gradient(ScalarField::constant(g1, 3.0))) < 1e-14);

  const Grid g({64, 64});
  const auto h = ScalarField::sample(g, [](double x, double y) { return std::sin(2 * x) * std::cos(3 * y); });
  const auto dh = gradient(h);
  double err = 0;
  for (Index c = 0; c < g.cells(); ++c) {
    const auto x = g.position(c);
    err = std::max(err, std::abs(dh.values()(c, 0) - 2 * std::cos(2 * x[0]) * std::cos(3 * x[1])));
    err = std::max(err, std::abs(dh.values()(c, 1) + 3 * std::sin(2 * x[0]) * std::sin(3 * x[1])));
  }
  CHECK(err < 1e-10);
  CHECK(std::abs(dh.values().col(0).mean()) < 1e-14);
}

TEST_CASE("divergence") {
  const Grid g({32, 32});
  const auto v = VectorField::sample(g, [](double x, double) { return std::array<double, 2>{std::sin(x), 0}; });
  const auto d = divergence(v);
  const auto exact = ScalarField::sample(g, [](double x, double) { return std::cos(x); });
  CHECK((d.values() - exact.values()).abs().maxCoeff() < 1e-12);

  const auto psi = ScalarField::sample(g, [](double x, double y) { return std::sin(x + 2 * y) + std::cos(3 * x); });
  CHECK(max_abs(divergence(skew_gradient(psi))) < 1e-12);
  CHECK(max_abs(divergence(VectorField::constant(g, {1.5, -2.0}))) < 1e-14);

  const auto w = VectorField::sample(g, [](double x, double y) {
    return std::array<double, 2>{std::exp(std::sin(x)) * std::cos(y), std::cos(x * 2) + std::sin(y)};
  });
  CHECK(std::abs(integrate(divergence(w))) < 1e-12);
}

TEST_CASE("inverse laplacian eigenfunctions") {
  const Grid g({32});
  auto sample = [&](auto f) { return ScalarField::sample(g, [&](double x, double) { return f(x); }); };
  const auto r1 = inverse_laplacian(sample([](double x) { return std::sin(x); }));
  CHECK((r1.values() + sample([](double x) { return std::sin(x); }).values()).abs().maxCoeff() < 1e-13);
  const auto r2 = inverse_laplacian(sample([](double x) { return std::cos(2 * x); }));
  CHECK((r2.values() + sample([](double x) { return std::cos(2 * x) / 4; }).values()).abs().maxCoeff() < 1e-13);
  CHECK(max_abs(inverse_laplacian(ScalarField::zero(g))) == 0);
}

TEST_CASE("inverse laplacian reports a nonzero mean") {
  const Grid g({16});
  int warnings = 0;
  ScopedWarningSink sink([&](std::string_view) { ++warnings; });
  double removed = 0;
  const auto r = inverse_laplacian(ScalarField::sample(g, [](double x, double) { return 1.0 + std::sin(x); }), &removed);
  CHECK(warnings == 1);
  CHECK(removed == doctest::Approx(1.0));
  CHECK(std::abs(mean(r)) < 1e-14);
  CHECK((laplacian(r).values() - ScalarField::sample(g, [](double x, double) { return std::sin(x); }).values())
            .abs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("helmholtz projection") {
  const Grid g({64, 64});
  const auto phi = ScalarField::sample(g, [](double x, double y) { return std::sin(x) * std::cos(2 * y) + std::cos(3 * x + y); });
  CHECK(max_abs(helmholtz_project(gradient(phi))) < 1e-10);

  const auto psi = ScalarField::sample(g, [](double x, double y) { return std::cos(x - y) + std::sin(4 * y); });
  const auto sol = skew_gradient(psi);
  CHECK((helmholtz_project(sol).values() - sol.values()).abs().maxCoeff() < 1e-10);

  const auto v = VectorField::sample(g, [](double x, double y) {
    return std::array<double, 2>{std::sin(x + y) + std::cos(2 * x), std::exp(std::cos(y)) * std::sin(x)};
  });
  const auto p1 = helmholtz_project(v);
  const auto p2 = helmholtz_project(p1);
  CHECK((p1.values() - p2.values()).abs().maxCoeff() < 1e-10);
  CHECK(max_abs(divergence(p1)) < 1e-10);
}

TEST_CASE("integrate and parseval") {
  const Grid g({16, 16});
  CHECK(integrate(ScalarField::constant(g, 1.0)) == doctest::Approx(kTwoPi * kTwoPi));
  const auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(x) + std::cos(2 * y) + 0.5; });
  CHECK(integrate(f) == doctest::Approx(0.5 * kTwoPi * kTwoPi).epsilon(1e-13));
  const double l2 = (f.values().square().sum()) * g.cell_volume();
  CHECK(modal_norm_squared(f) == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("resample is exact on band-limited data") {
  const Grid fine({32, 32}), coarse({16, 16});
  auto fn = [](double x, double y) { return std::sin(x) * std::cos(3 * y) + 0.25; };
  const auto r = resample(ScalarField::sample(fine, fn), coarse);
  CHECK((r.values() - ScalarField::sample(coarse, fn).values()).abs().maxCoeff() < 1e-13);
}
