#include "qcert/certify.hpp"

#include <cmath>
#include <numeric>

#include "qcert/parallel.hpp"

namespace qcert {
namespace {

// Born-rule draw on the given qubit of a subnormalized branch. Replaces the
// branch with the chosen residual and returns the outcome bit.
int born_step(SubnormalizedVector& branch, double& branch_mass, int qubit,
              const SingleQubitBasis& basis, PhiloxRng& rng) {
  Conditioned c0 = condition(branch, qubit, basis.b);
  const double ratio = branch_mass > 0 ? c0.prob / branch_mass : 0.0;
  const int bit = rng.uniform() < ratio ? 0 : 1;
  if (bit == 0) {
    branch_mass = c0.prob;
    branch = std::move(c0.residual);
  } else {
    Conditioned c1 = condition(branch, qubit, basis.b_perp);
    branch_mass = c1.prob;
    branch = std::move(c1.residual);
  }
  return bit;
}

const SingleQubitBasis kComputational{kKet0, kKet1};

}  // namespace

SubtestResult subtest(const SubnormalizedVector& lab_branch, BranchOracle branch0,
                      BranchOracle branch1, int held_qubit, PhiloxRng& rng) {
  const int m = lab_branch.n - 1;
  if (m < 0) throw ContractError("subtest: lab branch needs at least one qubit");

  SubtestResult res;
  SubnormalizedVector lab = lab_branch;
  double lab_mass = lab.norm_sq();
  if (lab_mass <= tol::kDegenerate) {
    throw DegenerateBranchError("subtest: zero-mass lab branch");
  }

  // The walk measures lab qubits 2..m+1 (its first qubit is held out) and
  // target qubits held_qubit+1 .. held_qubit+m.
  const OutcomeSampler sampler = [&](const SingleQubitBasis& basis, int) {
    return born_step(lab, lab_mass, 2, basis, rng);
  };
  LazyWalkResult walk =
      lazy_phase_path(branch0, branch1, held_qubit + 1, m, sampler);
  res.leaf = std::move(walk.path);
  res.walk_bases = std::move(walk.bases);

  // Reconstruct the target conditional on the held-out qubit. Linearity of
  // the query in each factor gives the normalizer as the sum of the two
  // branch masses, so this costs 3 further queries.
  const double target_mass = walk.mass0 + walk.mass1;
  if (target_mass <= tol::kDegenerate) {
    res.degenerate_target = true;
    res.verdict = Verdict::Reject;
    res.final_basis = kComputational;
    res.final_outcome = 1;
    return res;
  }
  ProductProjectorQuery final_base = branch0.base;
  final_base.clear(held_qubit);
  const ConditionalQubit cq =
      reconstruct_conditional_qubit(*branch0.oracle, final_base, held_qubit, target_mass);

  // The conditional of a pure state on a full product outcome is pure; its
  // Bloch vector sits on the sphere up to rounding.
  BlochVector r = bloch_of_density(cq.rho);
  const double nr = r.norm();
  if (nr <= tol::kValidate) {
    // A genuinely mixed reconstruction cannot arise from a pure target.
    throw ContractError("subtest: target conditional is not pure");
  }
  r = {r.x / nr, r.y / nr, r.z / nr};
  const Qubit1 target_vec = pure_of_bloch(r);
  res.final_basis = {target_vec, pure_of_bloch(-r)};

  res.final_outcome = born_step(lab, lab_mass, 1, res.final_basis, rng);
  res.verdict = res.final_outcome == 0 ? Verdict::Accept : Verdict::Reject;
  return res;
}

CertifyTranscript certify_once(const StateVector& lab, TargetOracle& tar, PhiloxRng& rng) {
  const int n = tar.qubit_count();
  if (lab.n != n) throw ContractError("certify_once: qubit count mismatch");

  CountingOracleView view(tar);
  CertifyTranscript t;
  t.n = n;
  t.k = 1 + static_cast<int>(rng.uniform_below(static_cast<uint64_t>(n)));

  // Computational-basis measurement of the first k-1 lab qubits.
  SubnormalizedVector labx = as_subnormalized(lab);
  double lab_mass = 1.0;
  t.prefix = 0;
  for (int j = 1; j < t.k; ++j) {
    const int bit = born_step(labx, lab_mass, 1, kComputational, rng);
    t.prefix = (t.prefix << 1) | static_cast<uint64_t>(bit);
  }

  // Target branch prefixes for the two values of qubit k.
  ProductProjectorQuery base = ProductProjectorQuery::all_identity(n);
  for (int j = 1; j < t.k; ++j) {
    const bool bit = (t.prefix >> (t.k - 1 - j)) & 1;
    base.set(j, bit ? kKet1 : kKet0);
  }
  ProductProjectorQuery base0 = base;
  base0.set(t.k, kKet0);
  ProductProjectorQuery base1 = base;
  base1.set(t.k, kKet1);

  SubtestResult sub = subtest(labx, BranchOracle{&view, std::move(base0)},
                              BranchOracle{&view, std::move(base1)}, t.k, rng);
  t.leaf = std::move(sub.leaf);
  t.walk_bases = std::move(sub.walk_bases);
  t.final_basis = sub.final_basis;
  t.final_outcome = sub.final_outcome;
  t.verdict = sub.verdict;
  t.degenerate_target = sub.degenerate_target;
  t.oracle_queries = view.query_count();
  if (t.oracle_queries > static_cast<uint64_t>(8 * n + 2)) {
    throw ContractError("certify_once: oracle query budget exceeded");
  }
  return t;
}

PureMixture PureMixture::pure(StateVector s) {
  PureMixture m;
  m.weights = {1.0};
  m.states.push_back(std::move(s));
  return m;
}

PureMixture PureMixture::mixed(std::vector<double> weights, std::vector<StateVector> states) {
  if (weights.empty() || weights.size() != states.size()) {
    throw ContractError("PureMixture: component count mismatch");
  }
  double total = 0;
  for (const double w : weights) {
    if (!(w > 0)) throw ContractError("PureMixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > tol::kValidate) {
    throw ContractError("PureMixture: weights must sum to 1");
  }
  const int n = states.front().n;
  for (const StateVector& s : states) {
    if (s.n != n) throw ContractError("PureMixture: mixed qubit counts");
  }
  PureMixture m;
  m.weights = std::move(weights);
  m.states = std::move(states);
  return m;
}

int PureMixture::n() const {
  if (states.empty()) throw ContractError("PureMixture: empty");
  return states.front().n;
}

double PureMixture::fidelity_with(StateView tar) const {
  double f = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    f += weights[i] * std::norm(overlap(tar, states[i]));
  }
  return f;
}

uint64_t WrapperConfig::resolved_copies(int n) const {
  if (copies > 0) return copies;
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
    throw ContractError("WrapperConfig: epsilon and delta must lie in (0, 1)");
  }
  const double raw = kCopiesConstant * (static_cast<double>(n) / epsilon) * std::log(2.0 / delta);
  return static_cast<uint64_t>(std::ceil(raw));
}

double WrapperConfig::resolved_threshold(int n) const {
  if (reject_threshold >= 0) return reject_threshold;
  if (!(epsilon > 0 && epsilon < 1)) {
    throw ContractError("WrapperConfig: epsilon must lie in (0, 1)");
  }
  return 3.0 * epsilon / (4.0 * n);
}

WrapperResult certify_amplified(const PureMixture& lab, TargetOracle& tar,
                                const WrapperConfig& cfg, uint64_t master_seed,
                                bool keep_transcripts, int max_threads) {
  const int n = tar.qubit_count();
  if (lab.n() != n) throw ContractError("certify_amplified: qubit count mismatch");

  WrapperResult res;
  res.copies = cfg.resolved_copies(n);
  res.threshold = cfg.resolved_threshold(n);
  if (res.copies == 0) throw ContractError("certify_amplified: copies must be positive");

  std::vector<uint8_t> rejected(res.copies, 0);
  if (keep_transcripts) res.transcripts.resize(res.copies);

  parallel_for(
      res.copies,
      [&](uint64_t copy) {
        PhiloxRng rng(master_seed, copy);
        std::size_t component = 0;
        if (lab.states.size() > 1) {
          const double u = rng.uniform();
          double acc = 0;
          for (std::size_t i = 0; i < lab.weights.size(); ++i) {
            acc += lab.weights[i];
            if (u < acc || i + 1 == lab.weights.size()) {
              component = i;
              break;
            }
          }
        }
        CertifyTranscript t = certify_once(lab.states[component], tar, rng);
        rejected[copy] = t.verdict == Verdict::Reject ? 1 : 0;
        if (keep_transcripts) res.transcripts[copy] = std::move(t);
      },
      max_threads);

  res.rejected = std::accumulate(rejected.begin(), rejected.end(), uint64_t{0});
  res.reject_fraction = static_cast<double>(res.rejected) / static_cast<double>(res.copies);
  res.verdict = res.reject_fraction < res.threshold ? Verdict::Accept : Verdict::Reject;
  return res;
}

}  // namespace qcert
