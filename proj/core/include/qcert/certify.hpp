// The single-copy certification test against an oracle-accessible target,
// its subtest, and the amplified multi-copy wrapper.
#pragma once

#include <cstdint>
#include <vector>

#include "qcert/dtbasis.hpp"
#include "qcert/oracle.hpp"
#include "qcert/qmath.hpp"
#include "qcert/rng.hpp"

namespace qcert {

enum class Verdict { Accept, Reject };

// Record of one full run: sampled k, measured prefix, realized leaf, every
// basis used, the final measurement, and the verdict.
struct CertifyTranscript {
  int n = 0;
  int k = 0;
  uint64_t prefix = 0;  // k-1 measured bits, MSB-first
  DtPath leaf;
  std::vector<SingleQubitBasis> walk_bases;
  SingleQubitBasis final_basis;
  int final_outcome = 1;  // 0 selects the target conditional
  Verdict verdict = Verdict::Reject;
  bool degenerate_target = false;  // target mass at (prefix, leaf) below threshold
  uint64_t oracle_queries = 0;
};

struct SubtestResult {
  Verdict verdict = Verdict::Reject;
  DtPath leaf;
  std::vector<SingleQubitBasis> walk_bases;
  SingleQubitBasis final_basis;
  int final_outcome = 1;
  bool degenerate_target = false;
};

// Measures the trailing qubits of `lab_branch` (all but its first) along the
// lazily evaluated phase tree of the two target branches, then measures the
// held-out first qubit against the reconstructed target conditional.
// `branch0`/`branch1` carry the target prefixes for the two values of the
// held-out qubit; `held_qubit` is its index in the oracle's full space.
// A dead target conditional at the reached leaf yields Reject with the
// degenerate flag set.
SubtestResult subtest(const SubnormalizedVector& lab_branch, BranchOracle branch0,
                      BranchOracle branch1, int held_qubit, PhiloxRng& rng);

// One full single-copy run: samples k, measures the lab prefix in the
// computational basis, runs the subtest. Oracle queries per run stay within
// 8n + 2, tracked in the transcript.
CertifyTranscript certify_once(const StateVector& lab, TargetOracle& tar, PhiloxRng& rng);

// Explicit finite mixture of pure lab states.
struct PureMixture {
  std::vector<double> weights;
  std::vector<StateVector> states;

  static PureMixture pure(StateVector s);
  static PureMixture mixed(std::vector<double> weights, std::vector<StateVector> states);
  int n() const;
  double fidelity_with(StateView tar) const;  // sum_i w_i |<tar|s_i>|^2
};

struct WrapperConfig {
  double epsilon = 0;
  double delta = 0;
  uint64_t copies = 0;          // 0 = derive from (epsilon, delta, n)
  double reject_threshold = -1;  // < 0 = default 3*epsilon/(4n)

  // copies = ceil(kCopiesConstant * (n/epsilon) * ln(2/delta))
  static constexpr double kCopiesConstant = 48.0;

  uint64_t resolved_copies(int n) const;
  double resolved_threshold(int n) const;
};

struct WrapperResult {
  Verdict verdict = Verdict::Reject;
  double reject_fraction = 0;
  uint64_t copies = 0;
  uint64_t rejected = 0;
  double threshold = 0;
  std::vector<CertifyTranscript> transcripts;  // by copy index; empty if not kept
};

// Runs certify_once on `copies` independent copies; each copy samples its
// mixture component and consumes the substream PhiloxRng(master_seed, copy).
// Accepts iff the reject fraction is below the threshold. Copies may run in
// parallel; results are ordered by copy index.
WrapperResult certify_amplified(const PureMixture& lab, TargetOracle& tar,
                                const WrapperConfig& cfg, uint64_t master_seed,
                                bool keep_transcripts = true, int max_threads = 0);

}  // namespace qcert
