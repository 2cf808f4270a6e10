#include "qcert/dtbasis.hpp"

#include <cmath>
#include <limits>

namespace qcert {
namespace {

BlochVector cross(const BlochVector& a, const BlochVector& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

BlochVector scaled(const BlochVector& v, double s) { return {v.x * s, v.y * s, v.z * s}; }

// Flip so the first coordinate exceeding the validation tolerance is positive.
BlochVector canonical_sign(const BlochVector& u) {
  for (const double c : {u.x, u.y, u.z}) {
    if (std::abs(c) > tol::kValidate) return c < 0 ? -u : u;
  }
  return u;
}

const BlochVector kAxisX{1, 0, 0};
const BlochVector kAxisY{0, 1, 0};
const BlochVector kAxisZ{0, 0, 1};

}  // namespace

uint64_t leaf_index_of(const std::vector<uint8_t>& outcomes) {
  uint64_t idx = 0;
  for (const uint8_t bit : outcomes) idx = (idx << 1) | (bit & 1);
  return idx;
}

SingleQubitBasis basis_from_axis(const BlochVector& axis) {
  const double nr = axis.norm();
  if (nr <= tol::kValidate) throw ContractError("basis_from_axis: zero axis");
  const BlochVector u = canonical_sign(scaled(axis, 1.0 / nr));
  return {pure_of_bloch(u), pure_of_bloch(-u)};
}

SingleQubitBasis equiprobable_basis(const Density1Q& rho0, const Density1Q& rho1) {
  const BlochVector r0 = bloch_of_density(rho0);
  const BlochVector r1 = bloch_of_density(rho1);
  BlochVector u = cross(r0, r1);
  if (u.norm() <= tol::kValidate) {
    // Collinear (or degenerate) inputs: any axis orthogonal to the surviving
    // Bloch vector works; pick deterministically.
    const BlochVector& ref = r0.norm() > tol::kValidate ? r0 : r1;
    if (ref.norm() <= tol::kValidate) return basis_from_axis(kAxisZ);
    u = cross(kAxisX, ref);
    if (u.norm() <= tol::kValidate) u = cross(kAxisY, ref);
  }
  return basis_from_axis(u);
}

namespace {

// Node-basis rule shared by the eager and lazy constructions: a dead branch
// contributes the maximally mixed state (zero-branch convention).
SingleQubitBasis node_basis(const std::optional<Density1Q>& rho0,
                            const std::optional<Density1Q>& rho1) {
  if (rho0 && rho1) return equiprobable_basis(*rho0, *rho1);
  if (rho0) return equiprobable_basis(*rho0, maximally_mixed());
  if (rho1) return equiprobable_basis(*rho1, maximally_mixed());
  return equiprobable_basis(maximally_mixed(), maximally_mixed());
}

std::optional<Density1Q> first_qubit_density(const SubnormalizedVector& s) {
  if (s.norm_sq() <= tol::kDegenerate) return std::nullopt;
  return reduced_density_1q(s, 1).rho;
}

void fill_tree(DtTree& tree, uint64_t node, const SubnormalizedVector& s0,
               const SubnormalizedVector& s1) {
  const SingleQubitBasis basis = node_basis(first_qubit_density(s0), first_qubit_density(s1));
  tree.nodes[node] = basis;
  if (s0.n <= 1) return;
  fill_tree(tree, 2 * node + 1, condition(s0, 1, basis.b).residual,
            condition(s1, 1, basis.b).residual);
  fill_tree(tree, 2 * node + 2, condition(s0, 1, basis.b_perp).residual,
            condition(s1, 1, basis.b_perp).residual);
}

}  // namespace

DtTree build_phase_tree(StateView phi0, StateView phi1, int eager_cap) {
  if (phi0.n != phi1.n) throw ContractError("build_phase_tree: qubit count mismatch");
  const int m = phi0.n;
  if (m < 0) throw ContractError("build_phase_tree: negative depth");
  if (m > eager_cap) {
    throw CapacityError("build_phase_tree: depth " + std::to_string(m) +
                        " exceeds eager cap " + std::to_string(eager_cap));
  }
  DtTree tree;
  tree.depth = m;
  if (m == 0) return tree;
  tree.nodes.resize((uint64_t{1} << m) - 1);
  fill_tree(tree, 0, as_subnormalized(phi0), as_subnormalized(phi1));
  return tree;
}

namespace {

void collect_leaf_amplitudes(const DtTree& tree, uint64_t node, int depth,
                             const SubnormalizedVector& s, uint64_t prefix,
                             std::vector<Amp>& out) {
  if (depth == tree.depth) {
    out[prefix] = s.amps[0];
    return;
  }
  const SingleQubitBasis& basis = tree.node(node);
  collect_leaf_amplitudes(tree, 2 * node + 1, depth + 1, condition(s, 1, basis.b).residual,
                          prefix << 1, out);
  collect_leaf_amplitudes(tree, 2 * node + 2, depth + 1,
                          condition(s, 1, basis.b_perp).residual, (prefix << 1) | 1, out);
}

void collect_leaf_residuals(const DtTree& tree, uint64_t node, int depth,
                            const SubnormalizedVector& s, uint64_t prefix,
                            std::vector<Qubit1>& out) {
  if (depth == tree.depth) {
    out[prefix] = {s.amps[0], s.amps[1]};
    return;
  }
  const SingleQubitBasis& basis = tree.node(node);
  collect_leaf_residuals(tree, 2 * node + 1, depth + 1, condition(s, 2, basis.b).residual,
                         prefix << 1, out);
  collect_leaf_residuals(tree, 2 * node + 2, depth + 1,
                         condition(s, 2, basis.b_perp).residual, (prefix << 1) | 1, out);
}

}  // namespace

std::vector<Amp> leaf_amplitudes(const DtTree& tree, StateView state) {
  if (state.n != tree.depth) throw ContractError("leaf_amplitudes: depth mismatch");
  std::vector<Amp> out(uint64_t{1} << tree.depth);
  collect_leaf_amplitudes(tree, 0, 0, as_subnormalized(state), 0, out);
  return out;
}

std::vector<Qubit1> leaf_residuals_keep_first(const DtTree& tree, StateView state) {
  if (state.n != tree.depth + 1) {
    throw ContractError("leaf_residuals_keep_first: depth mismatch");
  }
  std::vector<Qubit1> out(uint64_t{1} << tree.depth);
  collect_leaf_residuals(tree, 0, 0, as_subnormalized(state), 0, out);
  return out;
}

LazyWalkResult lazy_phase_path(BranchOracle& branch0, BranchOracle& branch1,
                               int first_free_qubit, int m, const OutcomeSampler& sampler) {
  if (branch0.oracle == nullptr || branch1.oracle == nullptr) {
    throw ContractError("lazy_phase_path: missing oracle");
  }
  const int n = branch0.base.n();
  if (branch1.base.n() != n) throw ContractError("lazy_phase_path: base size mismatch");
  if (m < 0 || first_free_qubit < 1 || first_free_qubit + m - 1 > n) {
    throw ContractError("lazy_phase_path: walk region out of range");
  }

  const auto ensure_mass = [](BranchOracle& br) {
    if (std::isnan(br.mass)) br.mass = br.oracle->query(br.base);
  };
  ensure_mass(branch0);
  ensure_mass(branch1);

  LazyWalkResult res;
  res.path.outcomes.reserve(m);
  res.bases.reserve(m);

  for (int step = 0; step < m; ++step) {
    const int qubit = first_free_qubit + step;
    const auto branch_density = [&](BranchOracle& br) -> std::optional<Density1Q> {
      if (br.mass <= tol::kDegenerate) return std::nullopt;
      return reconstruct_conditional_qubit(*br.oracle, br.base, qubit, br.mass).rho;
    };
    const std::optional<Density1Q> rho0 = branch_density(branch0);
    const std::optional<Density1Q> rho1 = branch_density(branch1);
    const SingleQubitBasis basis = node_basis(rho0, rho1);

    const int bit = sampler(basis, step);
    if (bit != 0 && bit != 1) throw ContractError("lazy_phase_path: sampler outcome not a bit");
    const Qubit1& w = bit ? basis.b_perp : basis.b;

    // The chosen-outcome query doubles as the next step's normalizer.
    const auto advance = [&](BranchOracle& br, bool alive) {
      br.base.set(qubit, w);
      br.mass = alive ? br.oracle->query(br.base) : 0.0;
    };
    advance(branch0, rho0.has_value());
    advance(branch1, rho1.has_value());

    res.path.outcomes.push_back(static_cast<uint8_t>(bit));
    res.bases.push_back(basis);
  }
  res.path.leaf_index = leaf_index_of(res.path.outcomes);
  res.mass0 = branch0.mass;
  res.mass1 = branch1.mass;
  return res;
}

}  // namespace qcert
