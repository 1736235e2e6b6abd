#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dmv/config.hpp"
#include "dmv/diagnostics.hpp"
#include "dmv/parallel.hpp"
#include "dmv/verify.hpp"

namespace fs = std::filesystem;
using namespace dmv;

namespace {

constexpr int kPass = 0, kCheckFailed = 1, kConfigError = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = "out";
};

Config load(const Options& o) {
  Config cfg = o.config.empty() ? Config() : Config::load(o.config);
  if (o.seed) cfg.set("ensemble.seed", std::to_string(*o.seed));
  return cfg;
}

fs::path prepare_output(const Options& o, const Config& cfg) {
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_resolved(cfg, dir);
  std::ofstream(dir / "FORMAT_VERSION") << kOutputFormatVersion << '\n';
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_simulate(const Options& o) {
  const Config cfg = load(o);
  EnsembleSpec spec = ensemble_from(cfg);
  spec.threads = o.threads;
  const fs::path dir = prepare_output(o, cfg);
  const long every = cfg.integer("output.snapshot_every");
  if (every < 0) throw ConfigError("output.snapshot_every: must be nonnegative");
  if (every > 0) {
    spec.on_sample = [&, row = std::make_shared<long>(0)](int path, std::uint64_t step, const std::vector<State>& states) {
      if (path != 0) return;
      if ((*row)++ % every != 0) return;
      const State& s = states.front();
      write_snapshot(dir / ("state_" + std::to_string(step) + ".bin"), make_state_snapshot(s.rho, s.mom, s.time));
    };
  }
  const auto runs = run_ensemble(spec);
  std::vector<EnergyLedger> ledgers;
  Index floored = 0;
  double added = 0;
  for (const auto& r : runs) {
    ledgers.push_back(r.ledger);
    floored += r.floored_cells;
    added += r.mass_added;
  }
  const LedgerStats stats = ledger_stats(ledgers);
  write_text(dir / "ledger.csv", ledger_stats_csv(stats));
  const auto ym = build_ym(runs[0].final_states, 0, spec.replicas);
  write_snapshot(dir / "ym_final.bin", export_ym(ym, spec.horizon));
  const LedgerRow& last = stats.mean.rows.back();
  const LedgerRow& last_se = stats.standard_error.rows.back();
  write_text(dir / "summary.json", "{\"rows\": " + std::to_string(stats.mean.rows.size()) +
                                       ", \"final_residual\": " + num(last.residual) +
                                       ", \"final_residual_se\": " + num(last_se.residual) +
                                       ", \"floored_cells\": " + std::to_string(floored) +
                                       ", \"mass_added\": " + num(added) + "}\n");
  std::cout << "simulate: " << runs.size() << " paths, " << stats.mean.rows.size() << " ledger rows, final residual "
            << last.residual << " +- " << last_se.residual << "\n";
  return kPass;
}

int cmd_verify(const Options& o) {
  const Config cfg = load(o);
  VerifyOptions vo;
  vo.law = model_from(cfg).law;
  vo.seed = std::uint64_t(cfg.integer("ensemble.seed"));
  const std::string obs = cfg.text("verify.observable");
  if (obs == "negated_energy")
    vo.jensen = negated_energy_observable(vo.law);
  else if (obs != "energy")
    throw ConfigError("verify.observable: expected energy or negated_energy, got '" + obs + "'");
  if (!cfg.text("verify.snapshot").empty()) vo.snapshot = cfg.text("verify.snapshot");
  const auto results = run_invariant_suite(vo);
  std::cout << format_check_table(results);
  for (const auto& r : results)
    if (!r.pass) return kCheckFailed;
  return kPass;
}

int cmd_weak_strong(const Options& o) {
  const Config cfg = load(o);
  WeakStrongConfig ws = weak_strong_from(cfg);
  ws.threads = o.threads;
  const fs::path dir = prepare_output(o, cfg);
  const auto rep = weak_strong_experiment(ws);
  write_text(dir / "weak_strong.csv", relative_energy_csv(rep));
  const double residual = gronwall_check(rep.t, rep.Emv_mean, rep.gronwall_c, rep.bias);
  double max_E = 0;
  for (double e : rep.Emv_mean) max_E = std::max(max_E, e);
  bool pass = residual <= 1e-12;
  if (ws.self_comparison) pass = pass && max_E < 1e-12;
  write_text(dir / "summary.json", "{\"gronwall_c\": " + num(rep.gronwall_c) + ", \"bias\": " + num(rep.bias) +
                                       ", \"gronwall_residual\": " + num(residual) + ", \"Emv_max\": " + num(max_E) +
                                       ", \"tau_min\": " + num(rep.tau_min) +
                                       ", \"pass\": " + (pass ? "true" : "false") + "}\n");
  std::cout << "weak-strong: max E_mv " << max_E << ", Gronwall c " << rep.gronwall_c << (pass ? ", pass\n" : ", FAIL\n");
  return pass ? kPass : kCheckFailed;
}

int cmd_limit_sweep(const Options& o) {
  const Config cfg = load(o);
  SweepConfig sc = sweep_from(cfg);
  sc.threads = o.threads;
  const fs::path dir = prepare_output(o, cfg);
  const auto rep = run_sweep(sc);
  write_text(dir / "sweep.csv", sweep_csv(rep));
  write_text(dir / "summary.json", sweep_summary_json(rep));
  std::cout << "limit-sweep: slope " << rep.fit.slope << ", monotone " << rep.fit.monotone << ", D non-increasing "
            << rep.D_nonincreasing << (rep.pass() ? ", pass\n" : ", FAIL\n");
  return rep.pass() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic compressible Navier-Stokes ensembles on the torus"};
  app.require_subcommand(1);
  Options o;
  int (*handler)(const Options&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "config file (key = value)");
    sub->add_option("--seed", o.seed, "master seed, overrides ensemble.seed");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory");
    sub->callback([&handler, fn] { handler = fn; });
  };
  add("simulate", "run an ensemble and write its energy ledger", cmd_simulate);
  add("verify", "run the invariant suite", cmd_verify);
  add("weak-strong", "coarse versus fine relative energy experiment", cmd_weak_strong);
  add("limit-sweep", "low Mach number limit sweep", cmd_limit_sweep);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  set_default_threads(o.threads);
  try {
    return handler(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}
