// Sampling-free analysis of the certification test by exhaustive enumeration:
// the full outcome distribution, fidelity gaps, the prefix-fidelity sequence,
// and the closed-form subtest probabilities. Shares the basis-construction
// code path with the runtime test so both sides are comparable to 1e-9.
#pragma once

#include <cstdint>
#include <vector>

#include "qcert/dtbasis.hpp"
#include "qcert/qmath.hpp"

namespace qcert {

inline constexpr int kDefaultAnalyzerCap = 12;

struct ExactRow {
  int k = 0;
  uint64_t prefix = 0;        // measured prefix bits, MSB-first, k-1 of them
  uint64_t leaf = 0;          // leaf index in the depth-(n-k) tree
  double p_accept = 0;        // joint probability mass of (k, x, leaf, accept)
  double p_reject = 0;
  bool degenerate_target = false;
};

struct ExactDistribution {
  double p_accept = 0;
  double p_reject = 0;
  std::vector<ExactRow> rows;
  double pruned_mass = 0;      // lab mass dropped by prefix pruning
  double degenerate_mass = 0;  // lab mass routed to Reject by dead target conditionals
};

// Enumerates every (k, prefix, leaf, outcome) with exact conditioning.
// Prefixes with lab mass <= tol::kPrune are pruned. Throws CapacityError
// when n exceeds the cap.
ExactDistribution exact_distribution(const StateVector& lab, const StateVector& tar,
                                     int analyzer_cap = kDefaultAnalyzerCap);

// Expected first-qubit conditional fidelity minus unconditioned fidelity.
// The expectation is over the lab branch's first-qubit measurement; dead
// target conditionals contribute overlap 0. Throws DegenerateBranchError for
// a zero-mass lab branch.
double fidelity_gap(const SubnormalizedVector& lab_branch,
                    const SubnormalizedVector& tar_branch);

// Phi[k] = E_x |<tar^x|lab^x>|^2 over k-bit prefixes x sampled from lab,
// for k = 0..n. Dead target conditionals contribute 0.
std::vector<double> phi_sequence(const StateVector& lab, const StateVector& tar);

// E over (k, x) of the fidelity gap, enumerated directly (not via phi).
double expected_fidelity_gap(const StateVector& lab, const StateVector& tar);

// True when every lab-reachable prefix has a live target conditional.
bool full_target_support(const StateVector& lab, const StateVector& tar);

// First-qubit split of an m-qubit pair against a depth-(m-1) leaf basis:
// branch norms a0/a1 of the target, lab leaf coordinates v0 and
// phase-corrected vtilde1, and the per-leaf phases zeta relating the two
// target branches. zeta is 1 on leaves where either target branch is dead.
struct SubtestDecomposition {
  double a0 = 0;
  double a1 = 0;
  std::vector<Amp> v0;
  std::vector<Amp> vtilde1;
  std::vector<Amp> zetas;
};

SubtestDecomposition decompose_subtest(const StateVector& lab, const StateVector& tar,
                                       const DtTree& tree);

struct SubtestProbs {
  double p_accept = 0;
  double p_reject = 0;
};

// Closed forms ||a0 v0 + a1 vtilde1||^2 and ||a1 v0 - a0 vtilde1||^2.
SubtestProbs subtest_closed_form(const SubtestDecomposition& dec);

// Independent enumeration route for the same probabilities.
SubtestProbs exact_subtest_distribution(const StateVector& lab, const StateVector& tar,
                                        const DtTree& tree);

// Accept probability of the full test assembled from the closed forms,
// summed over (k, x). Dual route to exact_distribution().p_accept.
double closed_form_accept_probability(const StateVector& lab, const StateVector& tar,
                                      int analyzer_cap = kDefaultAnalyzerCap);

}  // namespace qcert
