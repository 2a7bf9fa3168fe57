#include "xxlseg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace xxlseg {
namespace {

int env_thread_count() noexcept {
  if (const char* env = std::getenv("XXLSEG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::atomic<int>& configured() {
  static std::atomic<int> n{env_thread_count()};
  return n;
}

}  // namespace

int thread_count() noexcept { return configured().load(); }

void set_thread_count(int n) noexcept { configured().store(std::max(1, n)); }

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
  const std::int64_t n = end - begin;
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), n));
  if (workers <= 1) {
    fn(begin, end, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = begin + n * w / workers;
      const std::int64_t hi = begin + n * (w + 1) / workers;
      pool.emplace_back([&, lo, hi, w] {
        try {
          fn(lo, hi, w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace xxlseg
