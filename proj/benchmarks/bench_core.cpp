#include <benchmark/benchmark.h>

#include "qcert/analyzer.hpp"
#include "qcert/certify.hpp"
#include "qcert/dtbasis.hpp"
#include "qcert/mps.hpp"
#include "qcert/oracle.hpp"
#include "qcert/rng.hpp"

namespace {

qcert::StateVector random_state(int n, uint64_t seed) {
  qcert::PhiloxRng rng(seed, 0xbe7c);
  std::vector<qcert::Amp> amps(std::size_t{1} << n);
  double ns = 0;
  for (qcert::Amp& a : amps) {
    a = qcert::Amp(rng.gaussian(), rng.gaussian());
    ns += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(ns);
  for (qcert::Amp& a : amps) a *= inv;
  return qcert::StateVector(n, std::move(amps));
}

void BM_PhiloxBlock(benchmark::State& state) {
  qcert::PhiloxRng rng(42);
  uint64_t acc = 0;
  for (auto _ : state) acc ^= rng.next_u64();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PhiloxBlock);

void BM_DenseQuery(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const qcert::StateVector psi = random_state(n, 7);
  qcert::ProductProjectorQuery q = qcert::ProductProjectorQuery::all_identity(n);
  for (int i = 1; i <= n; i += 2) q.set(i, qcert::kKetPlus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcert::dense_query(psi, q));
  }
  state.SetComplexityN(1 << n);
}
BENCHMARK(BM_DenseQuery)->DenseRange(8, 14, 2)->Complexity();

void BM_MpsQuery(benchmark::State& state) {
  const int chi = static_cast<int>(state.range(0));
  qcert::PhiloxRng rng(11, 3);
  const qcert::MpsState mps = qcert::random_mps(32, chi, rng);
  qcert::ProductProjectorQuery q = qcert::ProductProjectorQuery::all_identity(32);
  for (int i = 1; i <= 32; i += 3) q.set(i, qcert::kKetImag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcert::mps_query(mps, q));
  }
}
BENCHMARK(BM_MpsQuery)->RangeMultiplier(2)->Range(2, 16);

void BM_PhaseTree(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const qcert::StateVector a = random_state(m, 21);
  const qcert::StateVector b = random_state(m, 22);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcert::build_phase_tree(a, b));
  }
  state.SetComplexityN(1 << m);
}
BENCHMARK(BM_PhaseTree)->DenseRange(6, 12, 2)->Complexity();

void BM_CertifyOnce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const qcert::StateVector tar = random_state(n, 31);
  const qcert::StateVector lab = random_state(n, 32);
  qcert::DenseOracle oracle(tar);
  uint64_t copy = 0;
  for (auto _ : state) {
    qcert::PhiloxRng rng(99, copy++);
    benchmark::DoNotOptimize(qcert::certify_once(lab, oracle, rng));
  }
}
BENCHMARK(BM_CertifyOnce)->DenseRange(6, 12, 2);

void BM_ExactDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const qcert::StateVector tar = random_state(n, 41);
  const qcert::StateVector lab = random_state(n, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcert::exact_distribution(lab, tar));
  }
}
BENCHMARK(BM_ExactDistribution)->DenseRange(4, 10, 2);

}  // namespace

BENCHMARK_MAIN();
