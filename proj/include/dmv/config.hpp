#pragma once

// Plain-text run configuration: one `section.key = value` per line, `#`
// comments, lists comma separated. Every key has a schema entry with a
// default; unknown keys are rejected.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dmv/limit_sweep.hpp"
#include "dmv/relative_energy.hpp"
#include "dmv/simulation.hpp"

namespace dmv {

inline constexpr int kOutputFormatVersion = 1;

struct ConfigKey {
  const char* key;
  const char* fallback;
  const char* help;
};

/// The full schema, sorted by key.
const std::vector<ConfigKey>& config_schema();

class Config {
 public:
  Config();

  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Overrides one key; unknown keys raise ConfigError.
  void set(const std::string& key, const std::string& value);

  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  /// Every schema key with its effective value, one `key = value` per line.
  std::string resolved() const;

 private:
  std::map<std::string, std::string> values_;
};

ModelConfig model_from(const Config& cfg);
Grid grid_from(const Config& cfg, const std::string& key = "grid.n");

/// `initial.kind`: wave, rest or taylor_green, scaled by `initial.amplitude`;
/// replicas add `initial.spread` times a keyed low-mode perturbation.
std::function<State(const Grid&, int path, int replica)> initial_from(const Config& cfg);

EnsembleSpec ensemble_from(const Config& cfg);
WeakStrongConfig weak_strong_from(const Config& cfg);
SweepConfig sweep_from(const Config& cfg);

/// Writes config.resolved (with the format version) into `dir`.
void write_resolved(const Config& cfg, const std::filesystem::path& dir);

}  // namespace dmv
