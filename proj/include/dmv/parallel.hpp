#pragma once

#include <functional>

#include "dmv/torus_field.hpp"

namespace dmv {

/// Worker count used when a call passes threads <= 0. Starts at 1.
int default_threads();
void set_default_threads(int threads);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out dynamically, so callers must write results into per-index slots. The
/// exception from the lowest failing index is rethrown after all workers stop.
void parallel_for(Index n, int threads, const std::function<void(Index)>& body);

}  // namespace dmv
