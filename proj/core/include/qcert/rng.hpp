#pragma once

#include <array>
#include <cstdint>

namespace qcert {

// Philox4x64-10 counter-based generator (Random123 family).
//
// Output is a pure function of (key, counter), so identically keyed engines
// replay identical streams regardless of thread scheduling. Parallel
// substreams are derived by keying: PhiloxRng(master_seed, stream_label)
// yields an independent stream per label with no shared state between
// workers. The block function matches the Random123 reference output; see
// the known-answer vectors in the tests.
class PhiloxRng {
 public:
  PhiloxRng() : PhiloxRng(0, 0) {}
  explicit PhiloxRng(uint64_t seed, uint64_t stream = 0) : key_{seed, stream} {}

  // One keyed block of the core bijection, exposed for known-answer tests.
  static std::array<uint64_t, 4> block(std::array<uint64_t, 4> counter,
                                       std::array<uint64_t, 2> key);

  uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Unbiased integer in [0, n); n must be positive.
  uint64_t uniform_below(uint64_t n);

  // Standard normal deviate (Box-Muller, pair cached).
  double gaussian();

  uint64_t seed() const { return key_[0]; }
  uint64_t stream() const { return key_[1]; }

 private:
  void refill();

  std::array<uint64_t, 2> key_;
  std::array<uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<uint64_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double spare_gaussian_ = 0;
  bool has_spare_ = false;
};

}  // namespace qcert
