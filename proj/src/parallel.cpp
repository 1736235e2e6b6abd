#include "dmv/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dmv {
namespace {
std::atomic<int> g_default_threads{1};
}

int default_threads() { return g_default_threads.load(); }

void set_default_threads(int threads) {
  if (threads < 1) throw InvalidArgument("set_default_threads: need at least one worker");
  g_default_threads.store(threads);
}

void parallel_for(Index n, int threads, const std::function<void(Index)>& body) {
  if (threads <= 0) threads = default_threads();
  if (n <= 0) return;
  if (threads == 1 || n == 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::mutex mu;
  Index failed_at = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (Index i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  const int count = static_cast<int>(std::min<Index>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(count - 1);
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dmv
