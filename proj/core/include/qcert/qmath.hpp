// Exact complex linear algebra for n-qubit pure states: amplitude storage,
// single-qubit conditioning, reduced densities, and Bloch-sphere geometry.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qcert/errors.hpp"

namespace qcert {

using Amp = std::complex<double>;
using Qubit1 = std::array<Amp, 2>;  // single-qubit amplitude pair

namespace tol {
inline constexpr double kValidate = 1e-9;    // type-invariant validation
inline constexpr double kExact = 1e-12;      // cross-checks of exact arithmetic
inline constexpr double kDegenerate = 1e-12; // squared-norm threshold for dead branches
inline constexpr double kPrune = 1e-14;      // enumeration prefix pruning
}  // namespace tol

// Fixed single-qubit kets.
inline const Qubit1 kKet0{Amp(1, 0), Amp(0, 0)};
inline const Qubit1 kKet1{Amp(0, 0), Amp(1, 0)};
inline const Qubit1 kKetPlus{Amp(0.7071067811865476, 0), Amp(0.7071067811865476, 0)};
inline const Qubit1 kKetImag{Amp(0.7071067811865476, 0), Amp(0, 0.7071067811865476)};

// n-qubit pure state with unit norm, validated on construction.
//
// Index convention is big-endian: qubit 1 occupies the most significant bit
// of the amplitude index, so "measure the first k qubits" addresses a
// contiguous index prefix.
struct StateVector {
  int n = 0;
  std::vector<Amp> amps;

  StateVector() = default;
  StateVector(int n_, std::vector<Amp> amps_);  // throws ContractError

  std::size_t dim() const { return amps.size(); }
};

// Projected branch vector; squared norm in [0, 1 + tol]. Branches are the
// universal intermediate and are never renormalized implicitly.
struct SubnormalizedVector {
  int n = 0;
  std::vector<Amp> amps;

  std::size_t dim() const { return amps.size(); }
  double norm_sq() const;
};

// Non-owning view over either state representation.
struct StateView {
  int n = 0;
  std::span<const Amp> amps;

  StateView(const StateVector& s) : n(s.n), amps(s.amps) {}
  StateView(const SubnormalizedVector& s) : n(s.n), amps(s.amps) {}
  StateView(int n_, std::span<const Amp> a) : n(n_), amps(a) {}
  std::size_t dim() const { return amps.size(); }
  double norm_sq() const;
};

struct BlochVector {
  double x = 0;
  double y = 0;
  double z = 0;

  double norm() const;
  BlochVector operator-() const { return {-x, -y, -z}; }
};

// 2x2 density matrix, row-major {m00, m01, m10, m11}.
struct Density1Q {
  std::array<Amp, 4> m{};
};

// Orthonormal single-qubit pair {|b>, |b_perp>}.
struct SingleQubitBasis {
  Qubit1 b{};
  Qubit1 b_perp{};
};

// --- scalars and small helpers -------------------------------------------

double q1_norm_sq(const Qubit1& v);
Amp q1_overlap(const Qubit1& a, const Qubit1& b);  // <a|b>
Qubit1 q1_normalized(const Qubit1& v);             // throws DegenerateBranchError
bool q1_is_unit(const Qubit1& v);

// Global-phase canonicalization: the largest-magnitude amplitude is made
// real positive (ties resolved toward index 0).
Qubit1 canonical_phase(Qubit1 v);

// --- state-level operations ----------------------------------------------

Amp overlap(StateView a, StateView b);  // <a|b>; throws on dimension mismatch

SubnormalizedVector as_subnormalized(StateView s);
StateVector normalized(const SubnormalizedVector& v);  // throws DegenerateBranchError

struct Conditioned {
  double prob = 0;                // squared norm of the projected branch
  SubnormalizedVector residual;   // branch vector on n-1 qubits, NOT renormalized
};

// Project `qubit` (1-based) onto the unit vector `outcome`. Renormalizing the
// residual when prob > 0 gives the conditioned state.
Conditioned condition(StateView state, int qubit, const Qubit1& outcome);

struct Reduced1Q {
  double prob_mass = 0;  // squared norm of the input
  Density1Q rho;         // normalized partial trace over the other qubits
};

// Reduced single-qubit density matrix; throws DegenerateBranchError when the
// input mass is at or below the degenerate threshold.
Reduced1Q reduced_density_1q(StateView state, int qubit);

// --- Bloch geometry --------------------------------------------------------

// Mutually inverse bijection rho = (I + x X + y Y + z Z) / 2.
BlochVector bloch_of_density(const Density1Q& rho);
Density1Q density_of_bloch(const BlochVector& v);  // validates |v| <= 1 + tol

Density1Q density_of_pure(const Qubit1& v);
BlochVector bloch_of_pure(const Qubit1& v);

// Pure state on the given unit Bloch axis, phase-canonicalized.
Qubit1 pure_of_bloch(const BlochVector& unit_axis);

Density1Q maximally_mixed();

// Born probability of `outcome` under rho: Re <w|rho|w>.
double born_probability(const Density1Q& rho, const Qubit1& outcome);

// Validation used at API boundaries and in tests; throws ContractError.
void validate_density(const Density1Q& rho);
void validate_basis(const SingleQubitBasis& basis);

// --- constructors -----------------------------------------------------------

StateVector computational_basis_state(int n, uint64_t index);
StateVector product_state(std::span<const Qubit1> factors);  // factors must be unit

}  // namespace qcert
