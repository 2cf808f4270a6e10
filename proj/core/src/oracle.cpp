#include "qcert/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qcert {
namespace {

void validate_query(const ProductProjectorQuery& q, int n) {
  if (q.n() != n) throw ContractError("query: factor count does not match qubit count");
  for (const ProjectorFactor& f : q.factors) {
    if (f.project && !q1_is_unit(*f.project)) {
      throw ContractError("query: projector vector is not unit");
    }
  }
}

// In-place |w><w| on `qubit` (1-based, big-endian).
void apply_projector(std::vector<Amp>& a, int n, int qubit, const Qubit1& w) {
  const int m = n - qubit;
  const std::size_t block = std::size_t{1} << m;
  const std::size_t groups = std::size_t{1} << (qubit - 1);
  const Amp c0 = std::conj(w[0]);
  const Amp c1 = std::conj(w[1]);
  for (std::size_t hi = 0; hi < groups; ++hi) {
    const std::size_t base = hi << (m + 1);
    for (std::size_t j = 0; j < block; ++j) {
      const Amp inner = c0 * a[base + j] + c1 * a[base + block + j];
      a[base + j] = w[0] * inner;
      a[base + block + j] = w[1] * inner;
    }
  }
}

}  // namespace

ProductProjectorQuery ProductProjectorQuery::all_identity(int n) {
  if (n < 1) throw ContractError("query: qubit count must be positive");
  ProductProjectorQuery q;
  q.factors.resize(n);
  return q;
}

ProductProjectorQuery& ProductProjectorQuery::set(int qubit, const Qubit1& w) {
  if (qubit < 1 || qubit > n()) throw ContractError("query: qubit index out of range");
  factors[qubit - 1] = ProjectorFactor::onto(w);
  return *this;
}

ProductProjectorQuery& ProductProjectorQuery::clear(int qubit) {
  if (qubit < 1 || qubit > n()) throw ContractError("query: qubit index out of range");
  factors[qubit - 1] = ProjectorFactor::identity();
  return *this;
}

int ProductProjectorQuery::projected_count() const {
  int c = 0;
  for (const ProjectorFactor& f : factors) c += f.project.has_value() ? 1 : 0;
  return c;
}

double TargetOracle::query(const ProductProjectorQuery& q) {
  validate_query(q, qubit_count());
  double v = evaluate(q);
  if (v < -tol::kValidate || v > 1.0 + tol::kValidate) {
    throw ContractError("oracle value outside [0, 1]: " + std::to_string(v));
  }
  v = std::clamp(v, 0.0, 1.0);
  query_count_.fetch_add(1, std::memory_order_relaxed);
  return v;
}

double dense_query(StateView state, const ProductProjectorQuery& q) {
  validate_query(q, state.n);
  // Projectors are idempotent, so <psi|Pi|psi> = ||Pi psi||^2.
  std::vector<Amp> scratch(state.amps.begin(), state.amps.end());
  for (int qubit = 1; qubit <= state.n; ++qubit) {
    const ProjectorFactor& f = q.factors[qubit - 1];
    if (f.project) apply_projector(scratch, state.n, qubit, *f.project);
  }
  double v = 0;
  for (const Amp& x : scratch) v += std::norm(x);
  return v;
}

double DenseOracle::evaluate(const ProductProjectorQuery& q) const {
  return dense_query(state_, q);
}

MpsOracle::MpsOracle(MpsState state, int chi_cap) : state_(std::move(state)) {
  if (chi_cap > 0 && max_bond_dimension(state_) > chi_cap) {
    throw CapacityError("MpsOracle: bond dimension " +
                        std::to_string(max_bond_dimension(state_)) + " exceeds cap " +
                        std::to_string(chi_cap));
  }
}

double mps_query(const MpsState& state, const ProductProjectorQuery& q) {
  validate_query(q, state.n);
  // Left-to-right transfer contraction with the per-site operator
  // O[s][s'] = <s|Pi_i|s'> sandwiched between bra and ket chains.
  std::vector<Amp> left{Amp(1, 0)};
  for (int i = 0; i < state.n; ++i) {
    const MpsTensor& t = state.tensors[i];
    const ProjectorFactor& f = q.factors[i];
    const int cl = t.chi_left;
    const int cr = t.chi_right;
    std::vector<Amp> out(static_cast<std::size_t>(cr) * cr, Amp(0, 0));

    // M_s = L * A_s for both physical values.
    std::vector<Amp> m0(static_cast<std::size_t>(cl) * cr, Amp(0, 0));
    std::vector<Amp> m1(static_cast<std::size_t>(cl) * cr, Amp(0, 0));
    for (int a = 0; a < cl; ++a) {
      for (int ap = 0; ap < cl; ++ap) {
        const Amp lv = left[static_cast<std::size_t>(a) * cl + ap];
        if (lv == Amp(0, 0)) continue;
        for (int b = 0; b < cr; ++b) {
          m0[static_cast<std::size_t>(a) * cr + b] += lv * t.at(ap, 0, b);
          m1[static_cast<std::size_t>(a) * cr + b] += lv * t.at(ap, 1, b);
        }
      }
    }
    const auto accumulate = [&](int s, int sp, Amp o) {
      if (o == Amp(0, 0)) return;
      const std::vector<Amp>& m = sp == 0 ? m0 : m1;
      for (int a = 0; a < cl; ++a) {
        for (int b = 0; b < cr; ++b) {
          const Amp c = std::conj(t.at(a, s, b)) * o;
          if (c == Amp(0, 0)) continue;
          for (int bp = 0; bp < cr; ++bp) {
            out[static_cast<std::size_t>(b) * cr + bp] += c * m[static_cast<std::size_t>(a) * cr + bp];
          }
        }
      }
    };
    if (f.is_identity()) {
      accumulate(0, 0, Amp(1, 0));
      accumulate(1, 1, Amp(1, 0));
    } else {
      const Qubit1& w = *f.project;
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
          accumulate(s, sp, w[s] * std::conj(w[sp]));
        }
      }
    }
    left = std::move(out);
  }
  return left[0].real();
}

double MpsOracle::evaluate(const ProductProjectorQuery& q) const {
  return mps_query(state_, q);
}

ConditionalQubit reconstruct_conditional_qubit(TargetOracle& oracle,
                                               const ProductProjectorQuery& base, int qubit) {
  if (qubit < 1 || qubit > base.n() || !base.factors[qubit - 1].is_identity()) {
    throw ContractError("reconstruct_conditional_qubit: base must hold Identity at qubit");
  }
  const double mass = oracle.query(base);
  return reconstruct_conditional_qubit(oracle, base, qubit, mass);
}

ConditionalQubit reconstruct_conditional_qubit(TargetOracle& oracle,
                                               const ProductProjectorQuery& base, int qubit,
                                               double known_mass) {
  if (qubit < 1 || qubit > base.n() || !base.factors[qubit - 1].is_identity()) {
    throw ContractError("reconstruct_conditional_qubit: base must hold Identity at qubit");
  }
  if (known_mass <= tol::kDegenerate) {
    throw DegenerateBranchError("reconstruct_conditional_qubit: conditional mass below threshold");
  }
  ProductProjectorQuery probe = base;
  probe.set(qubit, kKet0);
  const double p0 = oracle.query(probe);
  probe.set(qubit, kKetPlus);
  const double pp = oracle.query(probe);
  probe.set(qubit, kKetImag);
  const double pi = oracle.query(probe);

  BlochVector r{2.0 * pp / known_mass - 1.0, 2.0 * pi / known_mass - 1.0,
                2.0 * p0 / known_mass - 1.0};
  // Noise near the degenerate threshold can push the point slightly out of
  // the ball; pull it back onto the sphere.
  const double nr = r.norm();
  if (nr > 1.0) {
    r.x /= nr;
    r.y /= nr;
    r.z /= nr;
  }
  return {known_mass, density_of_bloch(r)};
}

}  // namespace qcert
