#include "qcert/rng.hpp"

#include <cmath>
#include <numbers>

#include "qcert/errors.hpp"

namespace qcert {
namespace {

constexpr uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline uint64_t mulhilo(uint64_t a, uint64_t b, uint64_t& hi) {
  const __uint128_t p = static_cast<__uint128_t>(a) * b;
  hi = static_cast<uint64_t>(p >> 64);
  return static_cast<uint64_t>(p);
}

}  // namespace

std::array<uint64_t, 4> PhiloxRng::block(std::array<uint64_t, 4> c,
                                         std::array<uint64_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    uint64_t hi0 = 0;
    uint64_t hi1 = 0;
    const uint64_t lo0 = mulhilo(kMul0, c[0], hi0);
    const uint64_t lo1 = mulhilo(kMul1, c[2], hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

void PhiloxRng::refill() {
  buffer_ = block(counter_, key_);
  buffer_pos_ = 0;
  for (int i = 0; i < 4; ++i) {
    if (++counter_[i] != 0) break;  // ripple carry
  }
}

uint64_t PhiloxRng::next_u64() {
  if (buffer_pos_ == 4) refill();
  return buffer_[buffer_pos_++];
}

double PhiloxRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t PhiloxRng::uniform_below(uint64_t n) {
  if (n == 0) throw ContractError("uniform_below: n must be positive");
  const uint64_t threshold = (-n) % n;  // 2^64 mod n
  for (;;) {
    const uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double PhiloxRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_gaussian_;
  }
  // 1 - uniform() lies in (0, 1], safe under the log.
  const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_gaussian_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace qcert
