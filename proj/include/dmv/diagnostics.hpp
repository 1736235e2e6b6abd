#pragma once

#include <functional>
#include <string_view>

namespace dmv {

/// Receives non-fatal diagnostics (floor activations, vacuum cells, forced
/// mean removal). The default sink writes to stderr.
using WarningSink = std::function<void(std::string_view)>;

/// Installs a new sink and returns the previous one. Not thread-safe with
/// respect to concurrent `warn` calls; install sinks before starting workers.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

/// RAII helper for tests: captures warnings for its lifetime.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink) : previous_(set_warning_sink(std::move(sink))) {}
  ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

}  // namespace dmv
