#include "qcert/qmath.hpp"

#include <algorithm>
#include <cmath>

namespace qcert {
namespace {

double span_norm_sq(std::span<const Amp> a) {
  double s = 0;
  for (const Amp& x : a) s += std::norm(x);
  return s;
}

bool all_finite(std::span<const Amp> a) {
  for (const Amp& x : a) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  }
  return true;
}

void check_qubit_range(int qubit, int n) {
  if (qubit < 1 || qubit > n) {
    throw ContractError("qubit index " + std::to_string(qubit) +
                        " out of range for " + std::to_string(n) + " qubits");
  }
}

}  // namespace

StateVector::StateVector(int n_, std::vector<Amp> amps_) : n(n_), amps(std::move(amps_)) {
  if (n < 1 || n > 30) throw ContractError("StateVector: qubit count out of range");
  if (amps.size() != (std::size_t{1} << n)) {
    throw ContractError("StateVector: amplitude count does not match qubit count");
  }
  if (!all_finite(amps)) throw ContractError("StateVector: non-finite amplitude");
  const double ns = span_norm_sq(amps);
  if (std::abs(ns - 1.0) > tol::kValidate) {
    throw ContractError("StateVector: norm^2 deviates from 1 by " +
                        std::to_string(std::abs(ns - 1.0)));
  }
}

double SubnormalizedVector::norm_sq() const { return span_norm_sq(amps); }
double StateView::norm_sq() const { return span_norm_sq(amps); }

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double q1_norm_sq(const Qubit1& v) { return std::norm(v[0]) + std::norm(v[1]); }

Amp q1_overlap(const Qubit1& a, const Qubit1& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

Qubit1 q1_normalized(const Qubit1& v) {
  const double ns = q1_norm_sq(v);
  if (ns <= tol::kDegenerate) throw DegenerateBranchError("q1_normalized: zero vector");
  const double inv = 1.0 / std::sqrt(ns);
  return {v[0] * inv, v[1] * inv};
}

bool q1_is_unit(const Qubit1& v) {
  return std::abs(q1_norm_sq(v) - 1.0) <= tol::kValidate;
}

Qubit1 canonical_phase(Qubit1 v) {
  const int idx = std::abs(v[1]) > std::abs(v[0]) ? 1 : 0;
  const double mag = std::abs(v[idx]);
  if (mag <= tol::kExact) return v;
  const Amp phase = std::conj(v[idx]) / mag;
  v[0] *= phase;
  v[1] *= phase;
  v[idx] = Amp(mag, 0);  // force the pivot exactly real
  return v;
}

Amp overlap(StateView a, StateView b) {
  if (a.n != b.n) throw ContractError("overlap: qubit count mismatch");
  Amp s{0, 0};
  for (std::size_t i = 0; i < a.amps.size(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
  return s;
}

SubnormalizedVector as_subnormalized(StateView s) {
  return SubnormalizedVector{s.n, std::vector<Amp>(s.amps.begin(), s.amps.end())};
}

StateVector normalized(const SubnormalizedVector& v) {
  const double ns = v.norm_sq();
  if (ns <= tol::kDegenerate) throw DegenerateBranchError("normalized: degenerate branch");
  std::vector<Amp> out(v.amps);
  const double inv = 1.0 / std::sqrt(ns);
  for (Amp& x : out) x *= inv;
  return StateVector(v.n, std::move(out));
}

Conditioned condition(StateView state, int qubit, const Qubit1& outcome) {
  check_qubit_range(qubit, state.n);
  if (!q1_is_unit(outcome)) throw ContractError("condition: outcome vector is not unit");

  const int m = state.n - qubit;             // qubits to the right
  const std::size_t block = std::size_t{1} << m;
  const std::size_t groups = std::size_t{1} << (qubit - 1);
  const Amp w0 = std::conj(outcome[0]);
  const Amp w1 = std::conj(outcome[1]);

  SubnormalizedVector res;
  res.n = state.n - 1;
  res.amps.resize(state.dim() / 2);
  double prob = 0;
  for (std::size_t hi = 0; hi < groups; ++hi) {
    const std::size_t base = hi << (m + 1);
    const std::size_t out_base = hi << m;
    for (std::size_t j = 0; j < block; ++j) {
      const Amp v = w0 * state.amps[base + j] + w1 * state.amps[base + block + j];
      res.amps[out_base + j] = v;
      prob += std::norm(v);
    }
  }
  return {prob, std::move(res)};
}

Reduced1Q reduced_density_1q(StateView state, int qubit) {
  check_qubit_range(qubit, state.n);
  const int m = state.n - qubit;
  const std::size_t block = std::size_t{1} << m;
  const std::size_t groups = std::size_t{1} << (qubit - 1);

  double p00 = 0, p11 = 0;
  Amp r01{0, 0};
  double mass = 0;
  for (std::size_t hi = 0; hi < groups; ++hi) {
    const std::size_t base = hi << (m + 1);
    for (std::size_t j = 0; j < block; ++j) {
      const Amp a0 = state.amps[base + j];
      const Amp a1 = state.amps[base + block + j];
      p00 += std::norm(a0);
      p11 += std::norm(a1);
      r01 += a0 * std::conj(a1);
    }
  }
  mass = p00 + p11;
  if (mass <= tol::kDegenerate) {
    throw DegenerateBranchError("reduced_density_1q: branch mass below threshold");
  }
  const double inv = 1.0 / mass;
  Density1Q rho;
  rho.m = {Amp(p00 * inv, 0), r01 * inv, std::conj(r01) * inv, Amp(p11 * inv, 0)};
  return {mass, rho};
}

BlochVector bloch_of_density(const Density1Q& rho) {
  return {2.0 * rho.m[1].real(), -2.0 * rho.m[1].imag(),
          rho.m[0].real() - rho.m[3].real()};
}

Density1Q density_of_bloch(const BlochVector& v) {
  if (v.norm() > 1.0 + tol::kValidate) {
    throw ContractError("density_of_bloch: Bloch vector outside the unit ball");
  }
  Density1Q rho;
  rho.m = {Amp((1.0 + v.z) / 2.0, 0), Amp(v.x / 2.0, -v.y / 2.0),
           Amp(v.x / 2.0, v.y / 2.0), Amp((1.0 - v.z) / 2.0, 0)};
  return rho;
}

Density1Q density_of_pure(const Qubit1& v) {
  Density1Q rho;
  rho.m = {v[0] * std::conj(v[0]), v[0] * std::conj(v[1]),
           v[1] * std::conj(v[0]), v[1] * std::conj(v[1])};
  return rho;
}

BlochVector bloch_of_pure(const Qubit1& v) {
  const Amp r01 = v[0] * std::conj(v[1]);
  return {2.0 * r01.real(), -2.0 * r01.imag(), std::norm(v[0]) - std::norm(v[1])};
}

Qubit1 pure_of_bloch(const BlochVector& u) {
  const double z = std::clamp(u.z, -1.0, 1.0);
  const double a0 = std::sqrt((1.0 + z) / 2.0);
  const double a1 = std::sqrt((1.0 - z) / 2.0);
  const double phi = std::atan2(u.y, u.x);
  return canonical_phase({Amp(a0, 0), std::polar(a1, phi)});
}

Density1Q maximally_mixed() {
  Density1Q rho;
  rho.m = {Amp(0.5, 0), Amp(0, 0), Amp(0, 0), Amp(0.5, 0)};
  return rho;
}

double born_probability(const Density1Q& rho, const Qubit1& w) {
  // <w|rho|w>
  const Amp v = std::conj(w[0]) * (rho.m[0] * w[0] + rho.m[1] * w[1]) +
                std::conj(w[1]) * (rho.m[2] * w[0] + rho.m[3] * w[1]);
  return v.real();
}

void validate_density(const Density1Q& rho) {
  if (std::abs(rho.m[1] - std::conj(rho.m[2])) > tol::kValidate ||
      std::abs(rho.m[0].imag()) > tol::kValidate ||
      std::abs(rho.m[3].imag()) > tol::kValidate) {
    throw ContractError("Density1Q: not Hermitian");
  }
  const double tr = rho.m[0].real() + rho.m[3].real();
  if (std::abs(tr - 1.0) > tol::kValidate) throw ContractError("Density1Q: trace != 1");
  // trace-1 Hermitian 2x2: min eigenvalue = (1 - sqrt(d^2 + 4|r|^2)) / 2
  const double d = rho.m[0].real() - rho.m[3].real();
  const double min_eig = (1.0 - std::sqrt(d * d + 4.0 * std::norm(rho.m[1]))) / 2.0;
  if (min_eig < -tol::kValidate) throw ContractError("Density1Q: negative eigenvalue");
}

void validate_basis(const SingleQubitBasis& basis) {
  if (!q1_is_unit(basis.b) || !q1_is_unit(basis.b_perp)) {
    throw ContractError("SingleQubitBasis: vectors are not unit");
  }
  if (std::abs(q1_overlap(basis.b, basis.b_perp)) > tol::kValidate) {
    throw ContractError("SingleQubitBasis: vectors are not orthogonal");
  }
}

StateVector computational_basis_state(int n, uint64_t index) {
  if (n < 1 || n > 30) throw ContractError("computational_basis_state: bad qubit count");
  const std::size_t dim = std::size_t{1} << n;
  if (index >= dim) throw ContractError("computational_basis_state: index out of range");
  std::vector<Amp> amps(dim, Amp(0, 0));
  amps[index] = Amp(1, 0);
  return StateVector(n, std::move(amps));
}

StateVector product_state(std::span<const Qubit1> factors) {
  if (factors.empty()) throw ContractError("product_state: no factors");
  std::vector<Amp> cur{Amp(1, 0)};
  for (const Qubit1& f : factors) {
    if (!q1_is_unit(f)) throw ContractError("product_state: factor is not unit");
    std::vector<Amp> next(cur.size() * 2);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      next[2 * j] = cur[j] * f[0];
      next[2 * j + 1] = cur[j] * f[1];
    }
    cur = std::move(next);
  }
  return StateVector(static_cast<int>(factors.size()), std::move(cur));
}

}  // namespace qcert
