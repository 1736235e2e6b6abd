#include "dmv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dmv {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError(key + ": cannot read '" + value + "' as " + what);
}

double to_number(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "a number");
    return x;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

template <typename F>
auto checked(const std::string& key, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = [] {
    std::vector<ConfigKey> s{
        {"model.a", "1", "pressure coefficient"},
        {"model.gamma", "2", "adiabatic exponent"},
        {"model.delta", "0", "artificial pressure strength"},
        {"model.Gamma", "6", "artificial pressure exponent"},
        {"model.nu", "0.01", "shear viscosity"},
        {"model.lambda", "0.01", "bulk viscosity"},
        {"model.eps", "1", "Mach number"},
        {"model.grad_threshold", "inf", "reference stopping threshold M"},
        {"noise.K", "0.1", "affine density coefficients, one per mode"},
        {"noise.L", "0.05", "affine momentum coefficients, one per mode"},
        {"grid.n", "64", "cells per direction (one entry per dimension)"},
        {"stepper.dt", "1e-3", "time step"},
        {"stepper.rho_floor", "1e-8", "density floor"},
        {"ensemble.paths", "16", "Wiener paths"},
        {"ensemble.replicas", "1", "members sharing each path"},
        {"ensemble.seed", "0", "master seed"},
        {"ensemble.horizon", "1", "final time"},
        {"ensemble.sample_every", "10", "steps between ledger rows"},
        {"initial.kind", "wave", "wave, rest or taylor_green"},
        {"initial.amplitude", "0.2", "amplitude of the initial profile"},
        {"initial.spread", "0", "replica perturbation amplitude"},
        {"output.snapshot_every", "0", "ledger rows between state snapshots of path 0 (0: none)"},
        {"weak_strong.self_comparison", "false", "reference on the ensemble grid and step"},
        {"weak_strong.bias", "0", "Gronwall bias"},
        {"sweep.eps", "1,0.5,0.25,0.125", "Mach schedule"},
        {"sweep.nu_coef", "1", "nu_eps = nu_coef eps^nu_power"},
        {"sweep.nu_power", "2", ""},
        {"sweep.lambda_coef", "1", "lambda_eps = lambda_coef eps^lambda_power"},
        {"sweep.lambda_power", "2", ""},
        {"sweep.delta_coef", "1", "delta_eps = delta_coef eps^delta_power"},
        {"sweep.delta_power", "1", ""},
        {"sweep.grid", "64,64", "sweep grid"},
        {"sweep.horizon", "0.5", "sweep final time"},
        {"sweep.samples", "10", "sample intervals"},
        {"sweep.grad_threshold", "2", "Euler stopping threshold M"},
        {"sweep.paths", "16", "Wiener paths"},
        {"sweep.replicas", "4", "members per path"},
        {"sweep.acoustic_safety", "0.9", "fraction of the acoustic step limit"},
        {"verify.observable", "energy", "Jensen check observable: energy or negated_energy"},
        {"verify.snapshot", "", "optional snapshot file to load and check"},
    };
    std::sort(s.begin(), s.end(), [](const ConfigKey& a, const ConfigKey& b) { return std::string(a.key) < b.key; });
    return s;
  }();
  return schema;
}

Config::Config() {
  for (const auto& k : config_schema()) values_[k.key] = k.fallback;
}

Config Config::parse(std::string_view text) {
  Config cfg;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    cfg.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key + ": unknown key");
  it->second = value;
}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key + ": unknown key");
  return it->second;
}

double Config::number(const std::string& key) const { return to_number(key, text(key)); }

long Config::integer(const std::string& key) const {
  const double x = number(key);
  if (!(std::abs(x) < 9e15) || x != std::floor(x)) bad_value(key, text(key), "an integer");
  return static_cast<long>(x);
}

bool Config::flag(const std::string& key) const {
  const std::string& v = text(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(text(key));
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(to_number(key, trim(item)));
  return out;
}

std::string Config::resolved() const {
  std::string out = "# format_version = " + std::to_string(kOutputFormatVersion) + "\n";
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

ModelConfig model_from(const Config& cfg) {
  ModelConfig m;
  m.law = {cfg.number("model.a"), cfg.number("model.gamma"), cfg.number("model.delta"), cfg.number("model.Gamma")};
  m.visc = {cfg.number("model.nu"), cfg.number("model.lambda")};
  m.mach_eps = cfg.number("model.eps");
  m.grad_threshold = cfg.number("model.grad_threshold");
  const auto K = cfg.numbers("noise.K");
  const auto L = cfg.numbers("noise.L");
  if (K.size() != L.size()) throw ConfigError("noise.L: needs as many entries as noise.K");
  m.noise = checked("noise.K", [&] { return NoiseModel::affine(K, L); });
  checked("model", [&] {
    m.validate();
    return 0;
  });
  return m;
}

Grid grid_from(const Config& cfg, const std::string& key) {
  std::vector<int> sizes;
  for (double n : cfg.numbers(key)) {
    if (n != std::floor(n) || n < 1) bad_value(key, cfg.text(key), "a list of cell counts");
    sizes.push_back(int(n));
  }
  return checked(key, [&] { return Grid(sizes); });
}

std::function<State(const Grid&, int, int)> initial_from(const Config& cfg) {
  const std::string kind = cfg.text("initial.kind");
  const double A = cfg.number("initial.amplitude");
  const double spread = cfg.number("initial.spread");
  const auto seed = std::uint64_t(cfg.integer("ensemble.seed"));
  if (kind != "wave" && kind != "rest" && kind != "taylor_green")
    throw ConfigError("initial.kind: expected wave, rest or taylor_green, got '" + kind + "'");
  if (!(std::abs(A) < 1)) throw ConfigError("initial.amplitude: must lie in (-1, 1)");
  if (!(spread >= 0 && spread < 1)) throw ConfigError("initial.spread: must lie in [0, 1)");
  return [=](const Grid& g, int path, int replica) {
    ScalarField::Values rho = ScalarField::Values::Ones(g.cells());
    VectorField::Values m = VectorField::Values::Zero(g.cells(), g.dim());
    if (kind == "wave") {
      rho += A * ScalarField::sample(g, [](double x, double) { return std::sin(x); }).values();
      m.col(0) = A * ScalarField::sample(g, [](double x, double) { return std::cos(x); }).values();
    } else if (kind == "taylor_green") {
      if (g.dim() != 2) throw ConfigError("initial.kind: taylor_green needs a 2D grid");
      m = A * taylor_green(g).values();
    }
    if (spread > 0) {
      const DataPerturbation p = low_mode_perturbation(g, seed, path, replica);
      rho += spread * p.eta.values();
      m += spread * p.zeta.values();
    }
    return State(ScalarField(g, std::move(rho)), VectorField(g, std::move(m)));
  };
}

EnsembleSpec ensemble_from(const Config& cfg) {
  EnsembleSpec spec;
  spec.model = model_from(cfg);
  spec.grid = grid_from(cfg);
  spec.stepper.dt = cfg.number("stepper.dt");
  spec.stepper.rho_floor = cfg.number("stepper.rho_floor");
  spec.paths = int(cfg.integer("ensemble.paths"));
  spec.replicas = int(cfg.integer("ensemble.replicas"));
  spec.seed = std::uint64_t(cfg.integer("ensemble.seed"));
  spec.horizon = cfg.number("ensemble.horizon");
  spec.sample_every = int(cfg.integer("ensemble.sample_every"));
  spec.initial = initial_from(cfg);
  checked("ensemble", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

WeakStrongConfig weak_strong_from(const Config& cfg) {
  WeakStrongConfig ws;
  ws.model = model_from(cfg);
  ws.grid = grid_from(cfg);
  ws.dt = cfg.number("stepper.dt");
  ws.horizon = cfg.number("ensemble.horizon");
  ws.sample_every = int(cfg.integer("ensemble.sample_every"));
  ws.paths = int(cfg.integer("ensemble.paths"));
  ws.replicas = int(cfg.integer("ensemble.replicas"));
  ws.seed = std::uint64_t(cfg.integer("ensemble.seed"));
  ws.self_comparison = cfg.flag("weak_strong.self_comparison");
  ws.bias = cfg.number("weak_strong.bias");
  const auto init = initial_from(cfg);
  // The reference carries no replica perturbation; members do when spread > 0.
  Config plain = cfg;
  plain.set("initial.spread", "0");
  const auto ref_init = initial_from(plain);
  ws.reference_initial = [ref_init](const Grid& g) { return ref_init(g, 0, 0); };
  ws.member_initial = init;
  checked("weak_strong", [&] {
    ws.validate();
    return 0;
  });
  return ws;
}

SweepConfig sweep_from(const Config& cfg) {
  SweepConfig s;
  s.eps = cfg.numbers("sweep.eps");
  s.law = {cfg.number("model.a"), cfg.number("model.gamma"), cfg.number("model.delta"), cfg.number("model.Gamma")};
  s.nu = {cfg.number("sweep.nu_coef"), cfg.number("sweep.nu_power")};
  s.lambda = {cfg.number("sweep.lambda_coef"), cfg.number("sweep.lambda_power")};
  s.delta = {cfg.number("sweep.delta_coef"), cfg.number("sweep.delta_power")};
  const auto K = cfg.numbers("noise.K");
  const auto L = cfg.numbers("noise.L");
  if (K.size() != L.size()) throw ConfigError("noise.L: needs as many entries as noise.K");
  s.noise = checked("noise.K", [&] { return NoiseModel::affine(K, L); });
  s.grid = grid_from(cfg, "sweep.grid");
  s.horizon = cfg.number("sweep.horizon");
  s.samples = int(cfg.integer("sweep.samples"));
  s.grad_threshold = cfg.number("sweep.grad_threshold");
  s.paths = int(cfg.integer("sweep.paths"));
  s.replicas = int(cfg.integer("sweep.replicas"));
  s.seed = std::uint64_t(cfg.integer("ensemble.seed"));
  s.acoustic_safety = cfg.number("sweep.acoustic_safety");
  checked("sweep", [&] {
    s.validate();
    return 0;
  });
  return s;
}

void write_resolved(const Config& cfg, const std::filesystem::path& dir) {
  std::ofstream os(dir / "config.resolved");
  if (!os) throw Error("cannot write " + (dir / "config.resolved").string());
  os << cfg.resolved();
}

}  // namespace dmv
