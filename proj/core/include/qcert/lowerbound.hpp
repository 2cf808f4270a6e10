// Hard-instance construction at desk scale: SIC tetrahedron states, random
// codeword superpositions and mixtures, cross-term sums over adaptive product
// bases, and total-variation distances between outcome distributions.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qcert/qmath.hpp"
#include "qcert/rng.hpp"

namespace qcert {

inline constexpr int kDefaultDenseCap = 12;

// The four tetrahedron states: chi_0 = |0>, chi_b for b in {1,2,3} with
// pairwise squared overlap 1/3.
const std::array<Qubit1, 4>& sic_states();
std::array<BlochVector, 4> sic_bloch_vectors();

// min over b in {1,2,3} of |<phi|chi_0><chi_b|phi>| + |<phi_perp|chi_0><chi_b|phi_perp>|
// for the basis on the given Bloch axis. Symmetric under phi <-> phi_perp.
double uncertainty_min_expression(const BlochVector& axis);

struct UncertaintyScan {
  double max_min_value = 0;
  BlochVector argmax;
  uint64_t bases_evaluated = 0;
};

// Maximizes uncertainty_min_expression over a Fibonacci-sphere grid of basis
// axes with deterministic local refinement. grid_resolution must be >= 1000.
UncertaintyScan verify_uncertainty_claim(int grid_resolution, int refine_iters);

// N codewords over {0,1,2,3}^n drawn i.i.d. from the keyed stream
// (seed, trial).
struct CodeEnsemble {
  int n = 0;
  int codeword_count = 0;
  std::vector<uint8_t> codewords;  // row-major, codeword t at [t*n .. t*n+n)
  uint64_t seed = 0;
  uint64_t trial = 0;

  uint8_t code(int t, int i) const { return codewords[static_cast<std::size_t>(t) * n + i]; }
};

CodeEnsemble random_code_ensemble(int n, int codeword_count, uint64_t seed, uint64_t trial = 0);
CodeEnsemble make_code_ensemble(int n, std::vector<uint8_t> codewords);

// Product state chi_{c^t_1} x ... x chi_{c^t_n}.
StateVector codeword_product_state(const CodeEnsemble& c, int t);

struct CodewordSuperposition {
  SubnormalizedVector v;  // (1/sqrt(N)) sum_t of codeword product states; free norm
  double norm_sq = 0;
  StateVector psi;        // v / ||v||
};

// Throws DegenerateBranchError when ||v|| <= 1e-9 (degenerate ensemble).
CodewordSuperposition build_codeword_superposition(const CodeEnsemble& c);

// Dense 2^n x 2^n operator, row-major.
struct DenseOperator {
  int n = 0;
  std::vector<Amp> m;

  std::size_t dim() const { return std::size_t{1} << n; }
  Amp at(std::size_t r, std::size_t c) const { return m[r * dim() + c]; }
};

// Uniform mixture of the codeword product states; throws CapacityError above cap.
DenseOperator build_mixture(const CodeEnsemble& c, int dense_cap = kDefaultDenseCap);

// <psi_C| rho_C |psi_C> without materializing the dense mixture.
double mixture_fidelity(const CodeEnsemble& c);

// Orthonormal basis measuring qubits outside S in fixed per-qubit bases and
// the qubits in S in an outcome-dependent completion basis. The completion
// for outside-outcome y is a 2^|S| x 2^|S| matrix whose row z holds the
// computational-basis coordinates of basis vector z on the S qubits.
struct AdaptiveProductBasis {
  int n = 0;
  std::vector<int> adaptive_qubits;              // S, 1-based, sorted
  std::vector<SingleQubitBasis> qubit_bases;     // size n; entries at S positions unused
  std::vector<std::vector<Amp>> completions;     // size 2^(n-|S|); each 2^|S| x 2^|S|

  int adaptivity() const { return static_cast<int>(adaptive_qubits.size()); }
  bool is_product() const { return adaptive_qubits.empty(); }
};

AdaptiveProductBasis random_product_basis(int n, PhiloxRng& rng);
AdaptiveProductBasis random_adaptive_basis(int n, const std::vector<int>& adaptive_qubits,
                                           PhiloxRng& rng);
void validate_adaptive_basis(const AdaptiveProductBasis& basis);

// Coordinates <phi_x|state> for every basis outcome x (full 2^n table).
std::vector<Amp> basis_amplitudes(StateView state, const AdaptiveProductBasis& basis);

// (1/N) sum_x |sum_{s != t} <phi_x|psi_s><psi_t|phi_x>|, enumerated exactly.
double cross_term_sum(const CodeEnsemble& c, const AdaptiveProductBasis& basis);

// Per-qubit factorized upper bound on cross_term_sum (product bases only).
double cross_term_upper_bound(const CodeEnsemble& c, const AdaptiveProductBasis& basis);

// Exact total-variation distance between measuring psi and the ensemble
// mixture in the given basis.
double tv_distance_in_basis(const StateVector& psi, const CodeEnsemble& mixture,
                            const AdaptiveProductBasis& basis);

}  // namespace qcert
