#include <cmath>

#include "doctest.h"
#include "dmv/ensemble_ym.hpp"
#include "dmv/parallel.hpp"

using namespace dmv;

namespace {

State random_state(const Grid& g, std::uint64_t key, double rho_lo = 0.5, double rho_hi = 2.0, double m_scale = 1.0) {
  ScalarField::Values r(g.cells());
  VectorField::Values m(g.cells(), g.dim());
  for (Index c = 0; c < g.cells(); ++c) {
    r[c] = rho_lo + (rho_hi - rho_lo) * keyed_uniform(key, std::uint64_t(c), 0, 0);
    for (int d = 0; d < g.dim(); ++d) m(c, d) = m_scale * keyed_normal(key, std::uint64_t(c), 1 + d, 0);
  }
  return {ScalarField(g, r), VectorField(g, m)};
}

State constant_state(const Grid& g, double rho, std::array<double, 2> m) {
  return {ScalarField::constant(g, rho), VectorField::constant(g, m)};
}

}  // namespace

TEST_CASE("parallel_for covers every index and propagates the first failure") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](Index i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_WITH(parallel_for(100, 3,
                                 [](Index i) {
                                   if (i == 17 || i == 60) throw InvalidArgument("fail " + std::to_string(i));
                                 }),
                    "fail 17");
}

TEST_CASE("build_ym weights and Dirac measures") {
  const Grid g({16});
  Ensemble one{{random_state(g, 1)}};
  const auto ym1 = build_ym(one);
  CHECK(ym1.atoms() == 1);
  CHECK((ym1.mean_density().values() - one.members[0].rho.values()).abs().maxCoeff() == 0);

  Ensemble two{{one.members[0], one.members[0]}};
  const auto ym2 = build_ym(two);
  CHECK((ym2.mean_density().values() - ym1.mean_density().values()).abs().maxCoeff() < 1e-15);
  CHECK((ym2.mean_momentum().values() - ym1.mean_momentum().values()).abs().maxCoeff() < 1e-15);

  Ensemble many;
  for (int i = 0; i < 100; ++i) many.members.push_back(random_state(g, 100 + i));
  CHECK((build_ym(many).total_mass().values() - 1.0).abs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(build_ym(Ensemble{}), InvalidArgument);
}

TEST_CASE("expect: linearity, permutation invariance and brute force") {
  const Grid g({8, 8});
  Ensemble ens;
  for (int i = 0; i < 7; ++i) ens.members.push_back(random_state(g, 200 + i));
  const auto ym = build_ym(ens);

  const Observable rho{"rho", [](double r, const SmallVector&) { return r; }, 1, 0};
  CHECK((expect(build_ym(Ensemble{{constant_state(g, 2.0, {0, 0})}}), rho).values() - 2.0).abs().maxCoeff() == 0);

  const Observable lin{"lin", [](double r, const SmallVector& m) { return 3 * r - 2 * m[0] + 0.5 * m[1]; }, 1, 1};
  const auto bm = ym.mean_momentum();
  const auto br = ym.mean_density();
  const auto e = expect(ym, lin);
  for (Index c = 0; c < g.cells(); ++c)
    CHECK(e[c] == doctest::Approx(3 * br[c] - 2 * bm.values()(c, 0) + 0.5 * bm.values()(c, 1)).epsilon(1e-13));

  const Observable kin{"kin", [](double r, const SmallVector& m) { return m.squaredNorm() / r; }, -1, 2};
  const auto ek = expect(ym, kin);
  for (Index c : {0, 5, 13, 22, 31, 40, 47, 50, 58, 63}) {
    double s = 0;
    for (const auto& st : ens.members) {
      const double mx = st.mom.values()(c, 0), my = st.mom.values()(c, 1);
      s += (mx * mx + my * my) / st.rho[c];
    }
    CHECK(std::abs(ek[c] - s / 7) < 1e-12 * std::max(1.0, s));
  }

  Ensemble perm = ens;
  std::reverse(perm.members.begin(), perm.members.end());
  CHECK((expect(build_ym(perm), kin).values() - ek.values()).abs().maxCoeff() < 1e-13);

  const Observable bad{"bad", [](double, const SmallVector&) { return NAN; }, 0, 0};
  CHECK_THROWS_AS(expect(ym, bad), NonFiniteValue);
  CHECK(kin.within_budget(2.0) == false);
  CHECK(rho.within_budget(2.0));
}

TEST_CASE("dissipation defect") {
  const Grid g({8});
  const PressureLaw law;
  CHECK(dissipation_defect(build_ym(Ensemble{{random_state(g, 3)}}), law).total == 0);

  Ensemble pm{{constant_state(g, 1.0, {1, 0}), constant_state(g, 1.0, {-1, 0})}};
  const auto d = dissipation_defect(build_ym(pm), law);
  CHECK((d.density.values() - 0.5).abs().maxCoeff() < 1e-15);
  CHECK(d.total == doctest::Approx(0.5 * kTwoPi));

  // Random two-atom measures against a direct evaluation of both sides.
  const Grid g2({32, 32});
  int violations = 0;
  double worst = 0;
  for (std::uint64_t t = 0; t < 1; ++t) {
    Ensemble e{{random_state(g2, 500, 0.1, 5.0, 2.0), random_state(g2, 501, 0.1, 5.0, 2.0)}};
    const auto dd = dissipation_defect(build_ym(e), law);
    for (Index c = 0; c < g2.cells(); ++c) {
      const auto& A = e.members[0];
      const auto& B = e.members[1];
      auto energy = [&](double r, double mx, double my) { return 0.5 * (mx * mx + my * my) / r + potential(law, r); };
      const double lhs = 0.5 * (energy(A.rho[c], A.mom.values()(c, 0), A.mom.values()(c, 1)) +
                                energy(B.rho[c], B.mom.values()(c, 0), B.mom.values()(c, 1)));
      const double rhs = energy(0.5 * (A.rho[c] + B.rho[c]), 0.5 * (A.mom.values()(c, 0) + B.mom.values()(c, 0)),
                                0.5 * (A.mom.values()(c, 1) + B.mom.values()(c, 1)));
      worst = std::max(worst, std::abs(dd.density[c] - (lhs - rhs)));
      if (dd.density[c] < 0) ++violations;
    }
  }
  CHECK(violations == 0);
  CHECK(worst < 1e-12);
}

TEST_CASE("momentum defect: hand example and trace identity") {
  const Grid g({8, 8});
  const PressureLaw law;
  Ensemble pm{{constant_state(g, 1.0, {1, 0}), constant_state(g, 1.0, {-1, 0})}};
  const auto md = momentum_defect(build_ym(pm), law);
  const auto K = md.kinetic.at(3);
  CHECK(K(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(K(0, 1)) < 1e-15);
  CHECK(std::abs(K(1, 1)) < 1e-15);
  CHECK(max_abs(md.pressure) < 1e-15);
  CHECK(momentum_defect(build_ym(Ensemble{{random_state(g, 9)}}), law).total().values().abs().maxCoeff() < 1e-14);

  for (double gamma : {1.4, 2.0, 3.0}) {
    const PressureLaw gl{1.7, gamma};
    Ensemble e;
    for (int i = 0; i < 5; ++i) e.members.push_back(random_state(g, 700 + i, 0.5, 2.0, 1.0));
    const auto ym = build_ym(e);
    const auto tot = momentum_defect(ym, gl).total();
    const Observable kin{"kin", [](double r, const SmallVector& m) { return 0.5 * m.squaredNorm() / r; }, -1, 2};
    const Observable pot{"pot", [&](double r, const SmallVector&) { return potential(gl, r); }, gamma, 0};
    const auto ek = expect(ym, kin), ep = expect(ym, pot);
    const auto br = ym.mean_density();
    const auto bm = ym.mean_momentum();
    for (Index c = 0; c < g.cells(); ++c) {
      const double kd = ek[c] - 0.5 * bm.values().row(c).square().sum() / br[c];
      const double pd = ep[c] - potential(gl, br[c]);
      const double tr = tot.at(c).trace();
      CHECK(std::abs(tr - (2 * kd + 2 * (gamma - 1) * pd)) < 1e-12 * std::max(1.0, std::abs(tr)));
    }
  }
}

TEST_CASE("defect domination") {
  const Grid g({8});
  const PressureLaw law;
  const double c = domination_constant(law, 1);
  CHECK(c == 2.0);
  CHECK(domination_constant(PressureLaw{1, 3}, 2) == 4.0);

  const auto dirac = defect_domination_audit(build_ym(Ensemble{{random_state(g, 4)}}), law, c);
  CHECK(dirac.pass());
  CHECK(dirac.max_ratio == 0);

  Ensemble pm{{constant_state(g, 1.0, {1, 0}), constant_state(g, 1.0, {-1, 0})}};
  const auto two = defect_domination_audit(build_ym(pm), law, c);
  CHECK(two.max_ratio == doctest::Approx(2.0));
  CHECK(two.pass());

  for (double gamma : {1.4, 2.0, 3.0}) {
    const PressureLaw gl{1, gamma};
    const Grid g2({32, 32});
    Ensemble e;
    for (int i = 0; i < 6; ++i) e.members.push_back(random_state(g2, 900 + i, 0.2, 4.0, 2.0));
    const auto rep = defect_domination_audit(build_ym(e), gl, domination_constant(gl, 2));
    CHECK(rep.cells == 1024);
    CHECK(rep.violations == 0);
    CHECK(rep.max_ratio <= domination_constant(gl, 2) + 1e-9);
  }
}
