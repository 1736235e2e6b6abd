#include "doctest.h"
#include "dmv/config.hpp"
#include "dmv/verify.hpp"

using namespace dmv;

TEST_CASE("config parsing") {
  const Config cfg = Config::parse(R"(
# comment
model.gamma = 1.4   # trailing comment
grid.n = 32, 16
noise.K = 0.1, 0.2
noise.L = 0, 0.05
weak_strong.self_comparison = true
)");
  CHECK(cfg.number("model.gamma") == 1.4);
  CHECK(cfg.numbers("grid.n") == std::vector<double>{32, 16});
  CHECK(cfg.flag("weak_strong.self_comparison"));
  CHECK(cfg.number("model.a") == 1);
  CHECK(std::isinf(cfg.number("model.grad_threshold")));
  const Grid g = grid_from(cfg);
  CHECK(g.dim() == 2);
  CHECK(g.size(1) == 16);
  CHECK(model_from(cfg).noise.modes() == 2);

  CHECK_THROWS_WITH_AS(Config::parse("model.bogus = 3"), "model.bogus: unknown key", ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("just words"), "line 1: expected 'key = value'", ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("model.nu = fast").number("model.nu"), "model.nu: cannot read 'fast' as a number",
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("ensemble.paths = 2.5").integer("ensemble.paths"),
                       "ensemble.paths: cannot read '2.5' as an integer", ConfigError);
  CHECK_THROWS_AS(model_from(Config::parse("noise.K = 0.1, 0.2")), ConfigError);
  CHECK_THROWS_AS(grid_from(Config::parse("grid.n = 12")), ConfigError);
  CHECK_THROWS_AS(ensemble_from(Config::parse("stepper.dt = 0.3")), ConfigError);
}

TEST_CASE("resolved config round trips and carries the format version") {
  Config c;
  c.set("sweep.eps", "1,0.5,0.25");
  const std::string text = c.resolved();
  CHECK(text.rfind("# format_version = 1\n", 0) == 0);
  CHECK(Config::parse(text).resolved() == text);
  for (const auto& k : config_schema()) CHECK(text.find(std::string(k.key) + " = ") != std::string::npos);
}

TEST_CASE("builders") {
  const Config cfg = Config::parse("grid.n = 16\nensemble.replicas = 2\ninitial.spread = 0.1\nstepper.dt = 1e-2");
  const EnsembleSpec spec = ensemble_from(cfg);
  const State a = spec.initial(spec.grid, 0, 0), b = spec.initial(spec.grid, 0, 1);
  CHECK((a.rho.values() - b.rho.values()).abs().maxCoeff() > 0);
  const WeakStrongConfig ws = weak_strong_from(cfg);
  const State r = ws.reference_initial(ws.grid);
  CHECK(std::abs(r.rho.values().maxCoeff() - 1.2) < 1e-2);
  const SweepConfig sw = sweep_from(Config::parse("sweep.eps = 1, 0.5, 0.25"));
  CHECK(sw.eps.size() == 3);
  CHECK_THROWS_AS(sweep_from(Config::parse("sweep.nu_power = 0")), ConfigError);
}

TEST_CASE("verify suite passes and rejects a concave observable") {
  const auto results = run_invariant_suite({});
  for (const auto& r : results) {
    INFO(r.module << ": " << r.name << ": " << r.detail);
    CHECK(r.pass);
  }
  VerifyOptions bad;
  bad.jensen = negated_energy_observable(bad.law);
  bool jensen_failed = false;
  for (const auto& r : run_invariant_suite(bad))
    if (r.name.find("Jensen") != std::string::npos) jensen_failed = !r.pass;
  CHECK(jensen_failed);
  CHECK(format_check_table(results).find("FAIL") == std::string::npos);
}
