#include "qcert/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcert/dtbasis.hpp"

namespace qcert {
namespace {

std::array<Qubit1, 4> make_sic() {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  std::array<Qubit1, 4> chi;
  chi[0] = kKet0;
  for (int k = 1; k <= 3; ++k) {
    const double phase = 2.0 * std::numbers::pi * (k - 1) / 3.0;
    chi[k] = {Amp(a, 0), std::polar(b, phase)};
  }
  return chi;
}

BlochVector normalized_axis(const BlochVector& v) {
  const double nr = v.norm();
  if (nr <= tol::kValidate) throw ContractError("zero direction");
  return {v.x / nr, v.y / nr, v.z / nr};
}

void check_dense_cap(int n, int cap, const char* who) {
  if (n > cap) {
    throw CapacityError(std::string(who) + ": " + std::to_string(n) +
                        " qubits exceeds dense cap " + std::to_string(cap));
  }
}

}  // namespace

const std::array<Qubit1, 4>& sic_states() {
  static const std::array<Qubit1, 4> chi = make_sic();
  return chi;
}

std::array<BlochVector, 4> sic_bloch_vectors() {
  const auto& chi = sic_states();
  return {bloch_of_pure(chi[0]), bloch_of_pure(chi[1]), bloch_of_pure(chi[2]),
          bloch_of_pure(chi[3])};
}

double uncertainty_min_expression(const BlochVector& axis) {
  const BlochVector u = normalized_axis(axis);
  const Qubit1 phi = pure_of_bloch(u);
  const Qubit1 phi_perp = pure_of_bloch(-u);
  const auto& chi = sic_states();
  double best = 2.0;
  for (int b = 1; b <= 3; ++b) {
    const double term = std::abs(q1_overlap(phi, chi[0]) * q1_overlap(chi[b], phi)) +
                        std::abs(q1_overlap(phi_perp, chi[0]) * q1_overlap(chi[b], phi_perp));
    best = std::min(best, term);
  }
  return best;
}

UncertaintyScan verify_uncertainty_claim(int grid_resolution, int refine_iters) {
  if (grid_resolution < 1000) {
    throw ContractError("verify_uncertainty_claim: grid resolution must be >= 1000");
  }
  UncertaintyScan scan;
  scan.max_min_value = -1;

  // Fibonacci sphere sweep.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < grid_resolution; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / grid_resolution;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    const BlochVector u{r * std::cos(phi), r * std::sin(phi), z};
    const double f = uncertainty_min_expression(u);
    ++scan.bases_evaluated;
    if (f > scan.max_min_value) {
      scan.max_min_value = f;
      scan.argmax = u;
    }
  }

  // Deterministic tangent-grid refinement around the incumbent.
  double radius = 2.0 / std::sqrt(static_cast<double>(grid_resolution));
  for (int iter = 0; iter < refine_iters; ++iter) {
    const BlochVector u = scan.argmax;
    // Tangent frame: cross with the least-aligned coordinate axis.
    const double ax = std::abs(u.x), ay = std::abs(u.y), az = std::abs(u.z);
    BlochVector seed{1, 0, 0};
    if (ay <= ax && ay <= az) seed = {0, 1, 0};
    if (az <= ax && az <= ay) seed = {0, 0, 1};
    BlochVector t1 = normalized_axis({u.y * seed.z - u.z * seed.y,
                                      u.z * seed.x - u.x * seed.z,
                                      u.x * seed.y - u.y * seed.x});
    BlochVector t2{u.y * t1.z - u.z * t1.y, u.z * t1.x - u.x * t1.z, u.x * t1.y - u.y * t1.x};
    for (int i = -5; i <= 5; ++i) {
      for (int j = -5; j <= 5; ++j) {
        if (i == 0 && j == 0) continue;
        const double s1 = radius * i / 5.0;
        const double s2 = radius * j / 5.0;
        const BlochVector cand =
            normalized_axis({u.x + s1 * t1.x + s2 * t2.x, u.y + s1 * t1.y + s2 * t2.y,
                             u.z + s1 * t1.z + s2 * t2.z});
        const double f = uncertainty_min_expression(cand);
        ++scan.bases_evaluated;
        if (f > scan.max_min_value) {
          scan.max_min_value = f;
          scan.argmax = cand;
        }
      }
    }
    radius *= 0.6;
  }
  return scan;
}

CodeEnsemble random_code_ensemble(int n, int codeword_count, uint64_t seed, uint64_t trial) {
  if (n < 1 || codeword_count < 1) throw ContractError("random_code_ensemble: bad parameters");
  CodeEnsemble c;
  c.n = n;
  c.codeword_count = codeword_count;
  c.seed = seed;
  c.trial = trial;
  c.codewords.resize(static_cast<std::size_t>(codeword_count) * n);
  PhiloxRng rng(seed, trial);
  for (uint8_t& x : c.codewords) x = static_cast<uint8_t>(rng.uniform_below(4));
  return c;
}

CodeEnsemble make_code_ensemble(int n, std::vector<uint8_t> codewords) {
  if (n < 1 || codewords.empty() || codewords.size() % n != 0) {
    throw ContractError("make_code_ensemble: bad codeword payload");
  }
  for (const uint8_t x : codewords) {
    if (x > 3) throw ContractError("make_code_ensemble: symbol out of range");
  }
  CodeEnsemble c;
  c.n = n;
  c.codeword_count = static_cast<int>(codewords.size()) / n;
  c.codewords = std::move(codewords);
  return c;
}

StateVector codeword_product_state(const CodeEnsemble& c, int t) {
  if (t < 0 || t >= c.codeword_count) throw ContractError("codeword index out of range");
  const auto& chi = sic_states();
  std::vector<Qubit1> factors(c.n);
  for (int i = 0; i < c.n; ++i) factors[i] = chi[c.code(t, i)];
  return product_state(factors);
}

CodewordSuperposition build_codeword_superposition(const CodeEnsemble& c) {
  const std::size_t dim = std::size_t{1} << c.n;
  CodewordSuperposition out;
  out.v.n = c.n;
  out.v.amps.assign(dim, Amp(0, 0));
  const double w = 1.0 / std::sqrt(static_cast<double>(c.codeword_count));
  for (int t = 0; t < c.codeword_count; ++t) {
    const StateVector p = codeword_product_state(c, t);
    for (std::size_t i = 0; i < dim; ++i) out.v.amps[i] += w * p.amps[i];
  }
  out.norm_sq = out.v.norm_sq();
  if (out.norm_sq <= 1e-18) {
    throw DegenerateBranchError("build_codeword_superposition: degenerate ensemble");
  }
  std::vector<Amp> psi(out.v.amps);
  const double inv = 1.0 / std::sqrt(out.norm_sq);
  for (Amp& a : psi) a *= inv;
  out.psi = StateVector(c.n, std::move(psi));
  return out;
}

DenseOperator build_mixture(const CodeEnsemble& c, int dense_cap) {
  check_dense_cap(c.n, dense_cap, "build_mixture");
  DenseOperator rho;
  rho.n = c.n;
  const std::size_t dim = rho.dim();
  rho.m.assign(dim * dim, Amp(0, 0));
  const double w = 1.0 / c.codeword_count;
  for (int s = 0; s < c.codeword_count; ++s) {
    const StateVector p = codeword_product_state(c, s);
    for (std::size_t r = 0; r < dim; ++r) {
      const Amp wr = w * p.amps[r];
      if (wr == Amp(0, 0)) continue;
      for (std::size_t col = 0; col < dim; ++col) {
        rho.m[r * dim + col] += wr * std::conj(p.amps[col]);
      }
    }
  }
  return rho;
}

double mixture_fidelity(const CodeEnsemble& c) {
  const CodewordSuperposition sup = build_codeword_superposition(c);
  double f = 0;
  for (int s = 0; s < c.codeword_count; ++s) {
    f += std::norm(overlap(sup.psi, codeword_product_state(c, s)));
  }
  return f / c.codeword_count;
}

AdaptiveProductBasis random_product_basis(int n, PhiloxRng& rng) {
  return random_adaptive_basis(n, {}, rng);
}

namespace {

// Haar-style random orthonormal rows via Gaussian matrix + Gram-Schmidt.
std::vector<Amp> random_unitary_rows(int dim, PhiloxRng& rng) {
  std::vector<Amp> u(static_cast<std::size_t>(dim) * dim);
  for (Amp& x : u) x = Amp(rng.gaussian(), rng.gaussian());
  for (int r = 0; r < dim; ++r) {
    for (int p = 0; p < r; ++p) {
      Amp ip(0, 0);
      for (int c = 0; c < dim; ++c) {
        ip += std::conj(u[static_cast<std::size_t>(p) * dim + c]) *
              u[static_cast<std::size_t>(r) * dim + c];
      }
      for (int c = 0; c < dim; ++c) {
        u[static_cast<std::size_t>(r) * dim + c] -= ip * u[static_cast<std::size_t>(p) * dim + c];
      }
    }
    double ns = 0;
    for (int c = 0; c < dim; ++c) ns += std::norm(u[static_cast<std::size_t>(r) * dim + c]);
    const double inv = 1.0 / std::sqrt(ns);
    for (int c = 0; c < dim; ++c) u[static_cast<std::size_t>(r) * dim + c] *= inv;
  }
  return u;
}

BlochVector random_direction(PhiloxRng& rng) {
  for (;;) {
    const BlochVector v{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    if (v.norm() > 1e-6) return normalized_axis(v);
  }
}

}  // namespace

AdaptiveProductBasis random_adaptive_basis(int n, const std::vector<int>& adaptive_qubits,
                                           PhiloxRng& rng) {
  if (n < 1) throw ContractError("random_adaptive_basis: bad qubit count");
  AdaptiveProductBasis basis;
  basis.n = n;
  basis.adaptive_qubits = adaptive_qubits;
  std::sort(basis.adaptive_qubits.begin(), basis.adaptive_qubits.end());
  for (std::size_t i = 0; i < basis.adaptive_qubits.size(); ++i) {
    const int q = basis.adaptive_qubits[i];
    if (q < 1 || q > n) throw ContractError("random_adaptive_basis: qubit out of range");
    if (i > 0 && basis.adaptive_qubits[i - 1] == q) {
      throw ContractError("random_adaptive_basis: duplicate adaptive qubit");
    }
  }
  basis.qubit_bases.resize(n);
  for (int q = 1; q <= n; ++q) {
    const bool adaptive = std::binary_search(basis.adaptive_qubits.begin(),
                                             basis.adaptive_qubits.end(), q);
    if (!adaptive) basis.qubit_bases[q - 1] = basis_from_axis(random_direction(rng));
  }
  const int ell = basis.adaptivity();
  if (ell > 0) {
    if (ell > 16) throw ContractError("random_adaptive_basis: adaptivity too large");
    const int cdim = 1 << ell;
    const std::size_t outcomes = std::size_t{1} << (n - ell);
    basis.completions.resize(outcomes);
    for (std::size_t y = 0; y < outcomes; ++y) {
      basis.completions[y] = random_unitary_rows(cdim, rng);
    }
  }
  return basis;
}

void validate_adaptive_basis(const AdaptiveProductBasis& basis) {
  if (basis.n < 1 || static_cast<int>(basis.qubit_bases.size()) != basis.n) {
    throw ContractError("AdaptiveProductBasis: bad shape");
  }
  for (int q = 1; q <= basis.n; ++q) {
    const bool adaptive = std::binary_search(basis.adaptive_qubits.begin(),
                                             basis.adaptive_qubits.end(), q);
    if (!adaptive) validate_basis(basis.qubit_bases[q - 1]);
  }
  const int ell = basis.adaptivity();
  if (ell == 0) return;
  const std::size_t cdim = std::size_t{1} << ell;
  if (basis.completions.size() != (std::size_t{1} << (basis.n - ell))) {
    throw ContractError("AdaptiveProductBasis: completion count mismatch");
  }
  for (const std::vector<Amp>& u : basis.completions) {
    if (u.size() != cdim * cdim) throw ContractError("AdaptiveProductBasis: completion shape");
    for (std::size_t r = 0; r < cdim; ++r) {
      for (std::size_t rp = r; rp < cdim; ++rp) {
        Amp ip(0, 0);
        for (std::size_t c = 0; c < cdim; ++c) ip += std::conj(u[r * cdim + c]) * u[rp * cdim + c];
        const double want = r == rp ? 1.0 : 0.0;
        if (std::abs(ip - Amp(want, 0)) > tol::kValidate) {
          throw ContractError("AdaptiveProductBasis: completion rows not orthonormal");
        }
      }
    }
  }
}

std::vector<Amp> basis_amplitudes(StateView state, const AdaptiveProductBasis& basis) {
  if (state.n != basis.n) throw ContractError("basis_amplitudes: qubit count mismatch");
  const int n = basis.n;
  std::vector<Amp> a(state.amps.begin(), state.amps.end());

  // Rotate every non-adaptive qubit into its measurement basis.
  for (int q = 1; q <= n; ++q) {
    if (std::binary_search(basis.adaptive_qubits.begin(), basis.adaptive_qubits.end(), q)) {
      continue;
    }
    const SingleQubitBasis& bq = basis.qubit_bases[q - 1];
    const int m = n - q;
    const std::size_t block = std::size_t{1} << m;
    const std::size_t groups = std::size_t{1} << (q - 1);
    const Amp b00 = std::conj(bq.b[0]), b01 = std::conj(bq.b[1]);
    const Amp p00 = std::conj(bq.b_perp[0]), p01 = std::conj(bq.b_perp[1]);
    for (std::size_t hi = 0; hi < groups; ++hi) {
      const std::size_t base = hi << (m + 1);
      for (std::size_t j = 0; j < block; ++j) {
        const Amp a0 = a[base + j];
        const Amp a1 = a[base + block + j];
        a[base + j] = b00 * a0 + b01 * a1;
        a[base + block + j] = p00 * a0 + p01 * a1;
      }
    }
  }
  const int ell = basis.adaptivity();
  if (ell == 0) return a;

  // Gather each outside-outcome's residual on the S qubits, apply the
  // completion rows, scatter back.
  const std::size_t cdim = std::size_t{1} << ell;
  std::vector<std::size_t> s_strides(ell);
  for (int i = 0; i < ell; ++i) {
    s_strides[i] = std::size_t{1} << (n - basis.adaptive_qubits[i]);
  }
  std::vector<std::size_t> outside_strides;
  for (int q = 1; q <= n; ++q) {
    if (!std::binary_search(basis.adaptive_qubits.begin(), basis.adaptive_qubits.end(), q)) {
      outside_strides.push_back(std::size_t{1} << (n - q));
    }
  }
  const std::size_t outcomes = std::size_t{1} << (n - ell);
  std::vector<Amp> residual(cdim);
  for (std::size_t y = 0; y < outcomes; ++y) {
    // Base index with outside bits placed, S bits zero.
    std::size_t base = 0;
    for (std::size_t b = 0; b < outside_strides.size(); ++b) {
      if ((y >> (outside_strides.size() - 1 - b)) & 1) base += outside_strides[b];
    }
    for (std::size_t z = 0; z < cdim; ++z) {
      std::size_t idx = base;
      for (int i = 0; i < ell; ++i) {
        if ((z >> (ell - 1 - i)) & 1) idx += s_strides[i];
      }
      residual[z] = a[idx];
    }
    const std::vector<Amp>& u = basis.completions[y];
    for (std::size_t z = 0; z < cdim; ++z) {
      Amp acc(0, 0);
      for (std::size_t w = 0; w < cdim; ++w) acc += std::conj(u[z * cdim + w]) * residual[w];
      std::size_t idx = base;
      for (int i = 0; i < ell; ++i) {
        if ((z >> (ell - 1 - i)) & 1) idx += s_strides[i];
      }
      a[idx] = acc;
    }
  }
  return a;
}

double cross_term_sum(const CodeEnsemble& c, const AdaptiveProductBasis& basis) {
  if (c.n != basis.n) throw ContractError("cross_term_sum: qubit count mismatch");
  const std::size_t dim = std::size_t{1} << c.n;
  std::vector<std::vector<Amp>> alpha(c.codeword_count);
  for (int s = 0; s < c.codeword_count; ++s) {
    alpha[s] = basis_amplitudes(codeword_product_state(c, s), basis);
  }
  double total = 0;
  for (std::size_t x = 0; x < dim; ++x) {
    Amp sum(0, 0);
    double diag = 0;
    for (int s = 0; s < c.codeword_count; ++s) {
      sum += alpha[s][x];
      diag += std::norm(alpha[s][x]);
    }
    total += std::abs(std::norm(sum) - diag);
  }
  return total / c.codeword_count;
}

double cross_term_upper_bound(const CodeEnsemble& c, const AdaptiveProductBasis& basis) {
  if (!basis.is_product()) {
    throw ContractError("cross_term_upper_bound: product bases only");
  }
  if (c.n != basis.n) throw ContractError("cross_term_upper_bound: qubit count mismatch");
  const auto& chi = sic_states();
  double total = 0;
  for (int s = 0; s < c.codeword_count; ++s) {
    for (int t = 0; t < c.codeword_count; ++t) {
      if (s == t) continue;
      double prod = 1.0;
      for (int i = 0; i < c.n; ++i) {
        const SingleQubitBasis& bq = basis.qubit_bases[i];
        const Qubit1& cs = chi[c.code(s, i)];
        const Qubit1& ct = chi[c.code(t, i)];
        prod *= std::abs(q1_overlap(bq.b, cs) * q1_overlap(ct, bq.b)) +
                std::abs(q1_overlap(bq.b_perp, cs) * q1_overlap(ct, bq.b_perp));
      }
      total += prod;
    }
  }
  return total / c.codeword_count;
}

double tv_distance_in_basis(const StateVector& psi, const CodeEnsemble& mixture,
                            const AdaptiveProductBasis& basis) {
  if (psi.n != basis.n || mixture.n != basis.n) {
    throw ContractError("tv_distance_in_basis: qubit count mismatch");
  }
  const std::size_t dim = std::size_t{1} << basis.n;
  const std::vector<Amp> pure_amps = basis_amplitudes(psi, basis);
  std::vector<double> mix_dist(dim, 0.0);
  const double w = 1.0 / mixture.codeword_count;
  for (int s = 0; s < mixture.codeword_count; ++s) {
    const std::vector<Amp> a = basis_amplitudes(codeword_product_state(mixture, s), basis);
    for (std::size_t x = 0; x < dim; ++x) mix_dist[x] += w * std::norm(a[x]);
  }
  double tv = 0;
  for (std::size_t x = 0; x < dim; ++x) {
    tv += std::abs(std::norm(pure_amps[x]) - mix_dist[x]);
  }
  return tv / 2.0;
}

}  // namespace qcert
