#include "qcert/analyzer.hpp"

#include <cmath>
#include <functional>

namespace qcert {
namespace {

void check_cap(int n, int cap, const char* who) {
  if (n > cap) {
    throw CapacityError(std::string(who) + ": " + std::to_string(n) +
                        " qubits exceeds analyzer cap " + std::to_string(cap));
  }
}

// Normalized overlap |<tar_hat|lab_hat>|^2 with the dead-target convention.
double conditional_fidelity(const SubnormalizedVector& lab, const SubnormalizedVector& tar) {
  const double lm = lab.norm_sq();
  const double tm = tar.norm_sq();
  if (tm <= tol::kDegenerate) return 0.0;
  if (lm <= tol::kDegenerate) return 0.0;
  return std::norm(overlap(tar, lab)) / (tm * lm);
}

// Walks all prefixes of lab/tar up to length `depth`, pruning on lab mass.
// visit(bits, len, labx, tarx) is called for every surviving prefix of
// length exactly `depth`.
void enumerate_prefixes(const SubnormalizedVector& lab, const SubnormalizedVector& tar,
                        int depth, uint64_t bits,
                        const std::function<void(uint64_t, const SubnormalizedVector&,
                                                 const SubnormalizedVector&)>& visit,
                        double& pruned) {
  if (depth == 0) {
    visit(bits, lab, tar);
    return;
  }
  for (int b = 0; b < 2; ++b) {
    const Qubit1& e = b ? kKet1 : kKet0;
    Conditioned lc = condition(lab, 1, e);
    if (lc.prob <= tol::kPrune) {
      pruned += lc.prob;
      continue;
    }
    Conditioned tc = condition(tar, 1, e);
    enumerate_prefixes(lc.residual, tc.residual, depth - 1, (bits << 1) | b, visit, pruned);
  }
}

struct LeafTables {
  DtTree tree;
  std::vector<Amp> u0, u1;  // target leaf scalars for the two first-qubit branches
  std::vector<Amp> v0, v1;  // lab leaf scalars
};

// Tree for the target's first-qubit branches plus leaf coordinates of all
// four conditioned vectors. labx/tarx live on m+1 qubits.
LeafTables leaf_tables(const SubnormalizedVector& labx, const SubnormalizedVector& tarx) {
  LeafTables t;
  const Conditioned t0 = condition(tarx, 1, kKet0);
  const Conditioned t1 = condition(tarx, 1, kKet1);
  t.tree = build_phase_tree(t0.residual, t1.residual, 63);
  t.u0 = leaf_amplitudes(t.tree, t0.residual);
  t.u1 = leaf_amplitudes(t.tree, t1.residual);
  t.v0 = leaf_amplitudes(t.tree, condition(labx, 1, kKet0).residual);
  t.v1 = leaf_amplitudes(t.tree, condition(labx, 1, kKet1).residual);
  return t;
}

}  // namespace

ExactDistribution exact_distribution(const StateVector& lab, const StateVector& tar,
                                     int analyzer_cap) {
  if (lab.n != tar.n) throw ContractError("exact_distribution: qubit count mismatch");
  check_cap(lab.n, analyzer_cap, "exact_distribution");
  const int n = lab.n;
  const double wk = 1.0 / n;

  ExactDistribution dist;
  const SubnormalizedVector lab0 = as_subnormalized(lab);
  const SubnormalizedVector tar0 = as_subnormalized(tar);

  for (int k = 1; k <= n; ++k) {
    enumerate_prefixes(
        lab0, tar0, k - 1, 0,
        [&](uint64_t bits, const SubnormalizedVector& labx, const SubnormalizedVector& tarx) {
          const LeafTables t = leaf_tables(labx, tarx);
          const uint64_t leaves = uint64_t{1} << t.tree.depth;
          for (uint64_t leaf = 0; leaf < leaves; ++leaf) {
            const double lab_mass = std::norm(t.v0[leaf]) + std::norm(t.v1[leaf]);
            const double tar_mass = std::norm(t.u0[leaf]) + std::norm(t.u1[leaf]);
            ExactRow row;
            row.k = k;
            row.prefix = bits;
            row.leaf = leaf;
            if (tar_mass <= tol::kDegenerate) {
              row.degenerate_target = true;
              row.p_reject = wk * lab_mass;
              dist.degenerate_mass += wk * lab_mass;
            } else {
              const double inv = 1.0 / std::sqrt(tar_mass);
              const Amp ip = std::conj(t.u0[leaf] * inv) * t.v0[leaf] +
                             std::conj(t.u1[leaf] * inv) * t.v1[leaf];
              row.p_accept = wk * std::norm(ip);
              row.p_reject = std::max(0.0, wk * lab_mass - row.p_accept);
            }
            dist.p_accept += row.p_accept;
            dist.p_reject += row.p_reject;
            dist.rows.push_back(row);
          }
        },
        dist.pruned_mass);
  }
  return dist;
}

double fidelity_gap(const SubnormalizedVector& lab_branch,
                    const SubnormalizedVector& tar_branch) {
  if (lab_branch.n != tar_branch.n) throw ContractError("fidelity_gap: qubit count mismatch");
  if (lab_branch.n < 1) throw ContractError("fidelity_gap: need at least one qubit");
  const double lm = lab_branch.norm_sq();
  if (lm <= tol::kDegenerate) throw DegenerateBranchError("fidelity_gap: zero-mass lab branch");

  double expected = 0;
  for (int b = 0; b < 2; ++b) {
    const Qubit1& e = b ? kKet1 : kKet0;
    const Conditioned lc = condition(lab_branch, 1, e);
    if (lc.prob <= tol::kDegenerate) continue;  // outcome never sampled
    const Conditioned tc = condition(tar_branch, 1, e);
    expected += (lc.prob / lm) * conditional_fidelity(lc.residual, tc.residual);
  }
  return expected - conditional_fidelity(lab_branch, tar_branch);
}

std::vector<double> phi_sequence(const StateVector& lab, const StateVector& tar) {
  if (lab.n != tar.n) throw ContractError("phi_sequence: qubit count mismatch");
  const int n = lab.n;
  std::vector<double> phi(n + 1, 0.0);
  double pruned = 0;

  // Depth-first over prefixes, accumulating at every depth on the way down.
  const std::function<void(const SubnormalizedVector&, const SubnormalizedVector&, int)>
      walk = [&](const SubnormalizedVector& labx, const SubnormalizedVector& tarx, int depth) {
        phi[depth] += labx.norm_sq() * conditional_fidelity(labx, tarx);
        if (depth == n) return;
        for (int b = 0; b < 2; ++b) {
          const Qubit1& e = b ? kKet1 : kKet0;
          Conditioned lc = condition(labx, 1, e);
          if (lc.prob <= tol::kPrune) {
            pruned += lc.prob;
            continue;
          }
          Conditioned tc = condition(tarx, 1, e);
          walk(lc.residual, tc.residual, depth + 1);
        }
      };
  walk(as_subnormalized(lab), as_subnormalized(tar), 0);
  return phi;
}

double expected_fidelity_gap(const StateVector& lab, const StateVector& tar) {
  if (lab.n != tar.n) throw ContractError("expected_fidelity_gap: qubit count mismatch");
  const int n = lab.n;
  double total = 0;
  double pruned = 0;
  for (int k = 1; k <= n; ++k) {
    enumerate_prefixes(
        as_subnormalized(lab), as_subnormalized(tar), k - 1, 0,
        [&](uint64_t, const SubnormalizedVector& labx, const SubnormalizedVector& tarx) {
          const double lm = labx.norm_sq();
          if (lm <= tol::kDegenerate) return;
          total += (1.0 / n) * lm * fidelity_gap(labx, tarx);
        },
        pruned);
  }
  return total;
}

bool full_target_support(const StateVector& lab, const StateVector& tar) {
  if (lab.n != tar.n) throw ContractError("full_target_support: qubit count mismatch");
  bool ok = true;
  const std::function<void(const SubnormalizedVector&, const SubnormalizedVector&)> walk =
      [&](const SubnormalizedVector& labx, const SubnormalizedVector& tarx) {
        if (!ok) return;
        if (tarx.norm_sq() <= tol::kDegenerate) {
          ok = false;
          return;
        }
        if (labx.n == 0) return;
        for (int b = 0; b < 2; ++b) {
          const Qubit1& e = b ? kKet1 : kKet0;
          Conditioned lc = condition(labx, 1, e);
          if (lc.prob <= tol::kDegenerate) continue;
          Conditioned tc = condition(tarx, 1, e);
          walk(lc.residual, tc.residual);
        }
      };
  walk(as_subnormalized(lab), as_subnormalized(tar));
  return ok;
}

SubtestDecomposition decompose_subtest(const StateVector& lab, const StateVector& tar,
                                       const DtTree& tree) {
  if (lab.n != tar.n) throw ContractError("decompose_subtest: qubit count mismatch");
  if (tree.depth != tar.n - 1) throw ContractError("decompose_subtest: tree depth mismatch");

  const Conditioned u0 = condition(tar, 1, kKet0);
  const Conditioned u1 = condition(tar, 1, kKet1);
  const Conditioned v0 = condition(lab, 1, kKet0);
  const Conditioned v1 = condition(lab, 1, kKet1);

  SubtestDecomposition dec;
  dec.a0 = std::sqrt(u0.prob);
  dec.a1 = std::sqrt(u1.prob);
  dec.v0 = leaf_amplitudes(tree, v0.residual);
  std::vector<Amp> v1_leaves = leaf_amplitudes(tree, v1.residual);

  const bool alive0 = u0.prob > tol::kDegenerate;
  const bool alive1 = u1.prob > tol::kDegenerate;
  std::vector<Amp> u0_leaves, u1_leaves;
  if (alive0 && alive1) {
    u0_leaves = leaf_amplitudes(tree, u0.residual);
    u1_leaves = leaf_amplitudes(tree, u1.residual);
    const double inv0 = 1.0 / dec.a0;
    const double inv1 = 1.0 / dec.a1;
    for (Amp& a : u0_leaves) a *= inv0;
    for (Amp& a : u1_leaves) a *= inv1;
  }

  const uint64_t leaves = uint64_t{1} << tree.depth;
  dec.zetas.resize(leaves);
  dec.vtilde1.resize(leaves);
  for (uint64_t l = 0; l < leaves; ++l) {
    Amp zeta(1, 0);
    if (alive0 && alive1 && std::norm(u0_leaves[l]) > tol::kExact) {
      zeta = u1_leaves[l] / u0_leaves[l];
      const double mag = std::abs(zeta);
      if (mag > 0) zeta /= mag;  // keep D exactly unitary
    }
    dec.zetas[l] = zeta;
    dec.vtilde1[l] = std::conj(zeta) * v1_leaves[l];
  }
  return dec;
}

SubtestProbs subtest_closed_form(const SubtestDecomposition& dec) {
  if (dec.v0.size() != dec.vtilde1.size()) {
    throw ContractError("subtest_closed_form: vector size mismatch");
  }
  double acc = 0;
  double rej = 0;
  for (std::size_t l = 0; l < dec.v0.size(); ++l) {
    acc += std::norm(dec.a0 * dec.v0[l] + dec.a1 * dec.vtilde1[l]);
    rej += std::norm(dec.a1 * dec.v0[l] - dec.a0 * dec.vtilde1[l]);
  }
  return {acc, rej};
}

SubtestProbs exact_subtest_distribution(const StateVector& lab, const StateVector& tar,
                                        const DtTree& tree) {
  if (lab.n != tar.n) throw ContractError("exact_subtest_distribution: qubit count mismatch");
  if (tree.depth != tar.n - 1) {
    throw ContractError("exact_subtest_distribution: tree depth mismatch");
  }
  const std::vector<Qubit1> lab_res = leaf_residuals_keep_first(tree, lab);
  const std::vector<Qubit1> tar_res = leaf_residuals_keep_first(tree, tar);
  SubtestProbs p;
  for (std::size_t l = 0; l < lab_res.size(); ++l) {
    const double lab_mass = q1_norm_sq(lab_res[l]);
    const double tar_mass = q1_norm_sq(tar_res[l]);
    if (tar_mass <= tol::kDegenerate) {
      p.p_reject += lab_mass;
      continue;
    }
    const double acc = std::norm(q1_overlap(tar_res[l], lab_res[l])) / tar_mass;
    p.p_accept += acc;
    p.p_reject += std::max(0.0, lab_mass - acc);
  }
  return p;
}

double closed_form_accept_probability(const StateVector& lab, const StateVector& tar,
                                      int analyzer_cap) {
  if (lab.n != tar.n) throw ContractError("closed_form_accept_probability: qubit mismatch");
  check_cap(lab.n, analyzer_cap, "closed_form_accept_probability");
  const int n = lab.n;
  double total = 0;
  double pruned = 0;
  for (int k = 1; k <= n; ++k) {
    enumerate_prefixes(
        as_subnormalized(lab), as_subnormalized(tar), k - 1, 0,
        [&](uint64_t, const SubnormalizedVector& labx, const SubnormalizedVector& tarx) {
          const double lab_mass = labx.norm_sq();
          if (lab_mass <= tol::kDegenerate) return;
          if (tarx.norm_sq() <= tol::kDegenerate) return;  // all mass rejects
          const StateVector labn = normalized(labx);
          const StateVector tarn = normalized(tarx);
          const Conditioned t0 = condition(tarn, 1, kKet0);
          const Conditioned t1 = condition(tarn, 1, kKet1);
          const DtTree tree = build_phase_tree(t0.residual, t1.residual, 63);
          const SubtestDecomposition dec = decompose_subtest(labn, tarn, tree);
          total += (1.0 / n) * lab_mass * subtest_closed_form(dec).p_accept;
        },
        pruned);
  }
  return total;
}

}  // namespace qcert
