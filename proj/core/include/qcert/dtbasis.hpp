// Decision-tree measurement bases: the equiprobable single-qubit basis, the
// recursive two-state phase-tree construction, and lazy oracle-driven
// evaluation of one root-to-leaf path.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "qcert/oracle.hpp"
#include "qcert/qmath.hpp"

namespace qcert {

inline constexpr int kDefaultEagerCap = 14;

// One root-to-leaf record. Outcome j is the edge taken at depth j: 0 for the
// node's |b>, 1 for |b_perp>. leaf_index packs the outcomes MSB-first, so it
// bijects with the outcome sequence.
struct DtPath {
  std::vector<uint8_t> outcomes;
  uint64_t leaf_index = 0;
};

uint64_t leaf_index_of(const std::vector<uint8_t>& outcomes);

// Depth-m binary tree with a single-qubit basis at every internal node,
// stored breadth-first: children of node i sit at 2i+1 (edge |b>) and
// 2i+2 (edge |b_perp>). Its 2^m leaves form an orthonormal product basis.
struct DtTree {
  int depth = 0;
  std::vector<SingleQubitBasis> nodes;  // size 2^depth - 1

  uint64_t node_count() const { return nodes.size(); }
  const SingleQubitBasis& node(uint64_t index) const { return nodes[index]; }
};

// Basis whose Bloch axis is orthogonal to both input Bloch vectors, so either
// input measures to each outcome with probability 1/2. Total function:
// collinear or zero inputs fall back to a deterministic axis choice, and two
// maximally mixed inputs yield the computational basis.
SingleQubitBasis equiprobable_basis(const Density1Q& rho0, const Density1Q& rho1);

// Canonicalized basis from a Bloch axis: the axis sign is flipped so its
// first nonzero coordinate (x, y, z order) is positive, and each vector's
// global phase makes its largest-magnitude amplitude real positive.
SingleQubitBasis basis_from_axis(const BlochVector& axis);

// Eager construction of a depth-m tree in which both inputs are phase
// states: every reachable depth-k node has probability 2^-k for both.
// Inputs may be subnormalized; a zero-mass branch is replaced by the
// maximally mixed state when choosing node bases (zero-branch convention).
// Materializes all 2^m - 1 nodes; throws CapacityError above eager_cap.
DtTree build_phase_tree(StateView phi0, StateView phi1, int eager_cap = kDefaultEagerCap);

// Per-leaf conditioned scalars <leaf|state>, indexed by leaf_index.
std::vector<Amp> leaf_amplitudes(const DtTree& tree, StateView state);

// Tree applied to qubits 2..m+1 of an (m+1)-qubit state, keeping qubit 1:
// per-leaf two-amplitude residuals.
std::vector<Qubit1> leaf_residuals_keep_first(const DtTree& tree, StateView state);

// A branch of the target realized as a projector prefix over a full-space
// oracle. `mass` caches the prefix normalizer <psi|base|psi>; NaN means
// "unknown, query it".
struct BranchOracle {
  TargetOracle* oracle = nullptr;
  ProductProjectorQuery base;
  double mass = std::numeric_limits<double>::quiet_NaN();
};

// Chooses the outcome at each walk step: 0 for |b>, 1 for |b_perp>.
using OutcomeSampler = std::function<int(const SingleQubitBasis& basis, int step)>;

struct LazyWalkResult {
  DtPath path;
  std::vector<SingleQubitBasis> bases;
  double mass0 = 0;  // branch masses at the reached leaf
  double mass1 = 0;
};

// Walks one root-to-leaf path of the implicit phase tree for the two target
// branches, reconstructing each node's basis on demand. Measures qubits
// first_free_qubit .. first_free_qubit + m - 1 in order. Appends the
// realized outcome projectors to both branch bases and maintains their
// normalizer caches, issuing at most 8m + 2 oracle queries.
LazyWalkResult lazy_phase_path(BranchOracle& branch0, BranchOracle& branch1,
                               int first_free_qubit, int m, const OutcomeSampler& sampler);

}  // namespace qcert
