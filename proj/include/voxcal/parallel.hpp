#ifndef VOXCAL_PARALLEL_HPP
#define VOXCAL_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace voxcal {

// Parallelism cap: VOXCAL_THREADS when set to a positive integer, otherwise
// the hardware count (at least 1).
inline unsigned thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("VOXCAL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

// Runs fn(i) for i in [0, n); results land in slot order, so the output is
// independent of scheduling.  fn must be safe to call concurrently.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn fn) {
  std::vector<R> out(n);
  const unsigned workers = std::min<std::size_t>(thread_cap(), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace voxcal

#endif
