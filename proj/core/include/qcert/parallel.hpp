#pragma once

#include <cstdint>
#include <functional>

namespace qcert {

// Worker cap: QCERT_THREADS when set (>= 1), else hardware concurrency.
int thread_cap();

// Runs body(i) for i in [0, count) across up to max_threads workers
// (0 = thread_cap()). Nested calls run serially. The caller is responsible
// for making bodies independent; results keyed by index stay deterministic.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(uint64_t count, const std::function<void(uint64_t)>& body,
                  int max_threads = 0);

}  // namespace qcert
