#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qcert/errors.hpp"
#include "qcert/rng.hpp"

using qcert::PhiloxRng;

TEST_CASE("philox4x64-10 known-answer vectors") {
  // Reference vectors for the Random123 philox4x64-10 function.
  struct Kat {
    std::array<uint64_t, 4> ctr;
    std::array<uint64_t, 2> key;
    std::array<uint64_t, 4> want;
  };
  const Kat kats[] = {
      {{0, 0, 0, 0},
       {0, 0},
       {0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull, 0xd7e772cee186176bull,
        0x7e68b68aec7ba23bull}},
      {{1, 0, 0, 0},
       {0, 0},
       {0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull, 0x1c8667a55d902e79ull,
        0x907d7a052fd5b4dcull}},
      {{0xffffffffffffffffull, 0xffffffffffffffffull, 0xffffffffffffffffull,
        0xffffffffffffffffull},
       {0xffffffffffffffffull, 0xffffffffffffffffull},
       {0x87b092c3013fe90bull, 0x438c3c67be8d0224ull, 0x9cc7d7c69cd777b6ull,
        0xa09caebf594f0ba0ull}},
      {{0, 0, 0, 0},
       {0xdeadbeefull, 42},
       {0xcfc92f39d43e1c14ull, 0x6fc88647a105a3b6ull, 0xde737fd96b62beabull,
        0x440ef7c58d9557a3ull}},
      {{123, 0, 0, 0},
       {0x9e3779b97f4a7c15ull, 7},
       {0xdb0d517944297f1cull, 0x062558de0e2b84d6ull, 0x6cb70c6a1c5fb683ull,
        0x48cda6f9fbb67404ull}},
  };
  for (const Kat& k : kats) {
    CHECK(PhiloxRng::block(k.ctr, k.key) == k.want);
  }
}

TEST_CASE("stream matches successive counter blocks") {
  PhiloxRng rng(0xdeadbeef, 42);
  const auto b0 = PhiloxRng::block({0, 0, 0, 0}, {0xdeadbeef, 42});
  const auto b1 = PhiloxRng::block({1, 0, 0, 0}, {0xdeadbeef, 42});
  for (int i = 0; i < 4; ++i) CHECK(rng.next_u64() == b0[i]);
  for (int i = 0; i < 4; ++i) CHECK(rng.next_u64() == b1[i]);
}

TEST_CASE("identical keys replay, distinct streams differ") {
  PhiloxRng a(7, 3), b(7, 3), c(7, 4);
  bool any_diff = false;
  for (int i = 0; i < 64; ++i) {
    const uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    any_diff |= va != c.next_u64();
  }
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0, 1)") {
  PhiloxRng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_below bounds and coverage") {
  PhiloxRng rng(2);
  std::set<uint64_t> seen;
  for (int i = 0; i < 3000; ++i) {
    const uint64_t v = rng.uniform_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(rng.uniform_below(1) == 0);
  CHECK_THROWS_AS(rng.uniform_below(0), qcert::ContractError);
}

TEST_CASE("gaussian moments") {
  PhiloxRng rng(3);
  const int samples = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < samples; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  const double mean = sum / samples;
  const double var = sq / samples - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
