#include "qcert/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qcert {
namespace {

thread_local bool t_inside_parallel = false;

}  // namespace

int thread_cap() {
  static const int cap = [] {
    if (const char* env = std::getenv("QCERT_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<int>(std::min(v, 256L));
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }();
  return cap;
}

void parallel_for(uint64_t count, const std::function<void(uint64_t)>& body,
                  int max_threads) {
  if (count == 0) return;
  const int cap = max_threads > 0 ? std::min(max_threads, thread_cap()) : thread_cap();
  const int workers = static_cast<int>(std::min<uint64_t>(cap, count));

  if (workers <= 1 || t_inside_parallel) {
    const bool prev = t_inside_parallel;
    t_inside_parallel = true;
    try {
      for (uint64_t i = 0; i < count; ++i) body(i);
    } catch (...) {
      t_inside_parallel = prev;
      throw;
    }
    t_inside_parallel = prev;
    return;
  }

  std::atomic<uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const uint64_t chunk = std::max<uint64_t>(1, count / (static_cast<uint64_t>(workers) * 8));

  const auto run = [&] {
    t_inside_parallel = true;
    while (!failed.load(std::memory_order_relaxed)) {
      const uint64_t begin = next.fetch_add(chunk);
      if (begin >= count) break;
      const uint64_t end = std::min(count, begin + chunk);
      for (uint64_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) threads.emplace_back(run);
  run();
  t_inside_parallel = false;
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qcert
