#include "qcert/mps.hpp"

#include <algorithm>
#include <cmath>

namespace qcert {
namespace {

// Transfer-matrix step: L'[b][b'] = sum_{s,a,a'} conj(A[a][s][b]) L[a][a'] A[a'][s][b'].
std::vector<Amp> transfer(const std::vector<Amp>& left, const MpsTensor& t) {
  const int cl = t.chi_left;
  const int cr = t.chi_right;
  std::vector<Amp> out(static_cast<std::size_t>(cr) * cr, Amp(0, 0));
  for (int s = 0; s < 2; ++s) {
    // M = L * A_s, shape chi_left x chi_right
    std::vector<Amp> m(static_cast<std::size_t>(cl) * cr, Amp(0, 0));
    for (int a = 0; a < cl; ++a) {
      for (int ap = 0; ap < cl; ++ap) {
        const Amp lv = left[static_cast<std::size_t>(a) * cl + ap];
        if (lv == Amp(0, 0)) continue;
        for (int b = 0; b < cr; ++b) {
          m[static_cast<std::size_t>(a) * cr + b] += lv * t.at(ap, s, b);
        }
      }
    }
    // out += A_s^dag * M
    for (int a = 0; a < cl; ++a) {
      for (int b = 0; b < cr; ++b) {
        const Amp c = std::conj(t.at(a, s, b));
        for (int bp = 0; bp < cr; ++bp) {
          out[static_cast<std::size_t>(b) * cr + bp] += c * m[static_cast<std::size_t>(a) * cr + bp];
        }
      }
    }
  }
  return out;
}

}  // namespace

MpsState MpsState::validated(int n, std::vector<MpsTensor> tensors) {
  if (n < 1) throw ContractError("MpsState: qubit count must be positive");
  if (static_cast<int>(tensors.size()) != n) {
    throw ContractError("MpsState: tensor count does not match qubit count");
  }
  int prev = 1;
  for (int i = 0; i < n; ++i) {
    const MpsTensor& t = tensors[i];
    if (t.chi_left != prev) throw ContractError("MpsState: bond dimension chain mismatch");
    if (t.chi_left < 1 || t.chi_right < 1) throw ContractError("MpsState: bad bond dimension");
    if (t.data.size() != static_cast<std::size_t>(t.chi_left) * 2 * t.chi_right) {
      throw ContractError("MpsState: tensor payload size mismatch");
    }
    prev = t.chi_right;
  }
  if (prev != 1) throw ContractError("MpsState: trailing bond dimension must be 1");

  MpsState s{n, std::move(tensors)};
  const double ns = mps_norm_sq(s);
  if (std::abs(ns - 1.0) > tol::kValidate) {
    throw ContractError("MpsState: norm^2 deviates from 1 by " + std::to_string(std::abs(ns - 1.0)));
  }
  return s;
}

double mps_norm_sq(const MpsState& s) {
  std::vector<Amp> left{Amp(1, 0)};
  for (const MpsTensor& t : s.tensors) left = transfer(left, t);
  return left[0].real();
}

int max_bond_dimension(const MpsState& s) {
  int chi = 1;
  for (const MpsTensor& t : s.tensors) chi = std::max(chi, std::max(t.chi_left, t.chi_right));
  return chi;
}

StateVector mps_to_dense(const MpsState& s, int dense_cap) {
  if (s.n > dense_cap) {
    throw CapacityError("mps_to_dense: " + std::to_string(s.n) + " qubits exceeds cap " +
                        std::to_string(dense_cap));
  }
  // Partial amplitudes indexed by (prefix, right bond).
  std::vector<Amp> cur{Amp(1, 0)};
  std::size_t rows = 1;
  for (const MpsTensor& t : s.tensors) {
    std::vector<Amp> next(rows * 2 * t.chi_right, Amp(0, 0));
    for (std::size_t x = 0; x < rows; ++x) {
      for (int s_idx = 0; s_idx < 2; ++s_idx) {
        for (int b = 0; b < t.chi_right; ++b) {
          Amp acc(0, 0);
          for (int a = 0; a < t.chi_left; ++a) {
            acc += cur[x * t.chi_left + a] * t.at(a, s_idx, b);
          }
          next[(x * 2 + s_idx) * t.chi_right + b] = acc;
        }
      }
    }
    cur = std::move(next);
    rows *= 2;
  }
  return StateVector(s.n, std::move(cur));
}

MpsState mps_product_state(std::span<const Qubit1> factors) {
  if (factors.empty()) throw ContractError("mps_product_state: no factors");
  std::vector<MpsTensor> tensors;
  tensors.reserve(factors.size());
  for (const Qubit1& f : factors) {
    if (!q1_is_unit(f)) throw ContractError("mps_product_state: factor is not unit");
    MpsTensor t;
    t.chi_left = 1;
    t.chi_right = 1;
    t.data = {f[0], f[1]};
    tensors.push_back(std::move(t));
  }
  return MpsState::validated(static_cast<int>(factors.size()), std::move(tensors));
}

MpsState mps_ghz(int n) {
  if (n < 1) throw ContractError("mps_ghz: bad qubit count");
  if (n == 1) return mps_product_state(std::array<Qubit1, 1>{kKetPlus});
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<MpsTensor> tensors(n);
  // Boundary tensors carry the 1/sqrt(2) weight; the bulk is a diagonal chain.
  tensors[0] = MpsTensor{1, 2, {Amp(r, 0), Amp(0, 0), Amp(0, 0), Amp(r, 0)}};
  for (int i = 1; i + 1 < n; ++i) {
    MpsTensor t;
    t.chi_left = 2;
    t.chi_right = 2;
    t.data.assign(8, Amp(0, 0));
    t.data[(0 * 2 + 0) * 2 + 0] = Amp(1, 0);  // a=0, s=0, b=0
    t.data[(1 * 2 + 1) * 2 + 1] = Amp(1, 0);  // a=1, s=1, b=1
    tensors[i] = std::move(t);
  }
  tensors[n - 1] = MpsTensor{2, 1, {Amp(1, 0), Amp(0, 0), Amp(0, 0), Amp(1, 0)}};
  return MpsState::validated(n, std::move(tensors));
}

MpsState random_mps(int n, int chi_max, PhiloxRng& rng) {
  if (n < 1 || chi_max < 1) throw ContractError("random_mps: bad parameters");
  std::vector<MpsTensor> tensors(n);
  int prev = 1;
  for (int i = 0; i < n; ++i) {
    const int right_budget = (n - 1 - i) < 31 ? (1 << (n - 1 - i)) : chi_max;
    const int cr = (i == n - 1) ? 1 : std::min({chi_max, 2 * prev, right_budget});
    MpsTensor t;
    t.chi_left = prev;
    t.chi_right = cr;
    t.data.resize(static_cast<std::size_t>(prev) * 2 * cr);
    for (Amp& x : t.data) x = Amp(rng.gaussian(), rng.gaussian());
    tensors[i] = std::move(t);
    prev = cr;
  }
  MpsState s{n, std::move(tensors)};
  const double ns = mps_norm_sq(s);
  const double scale = std::pow(ns, -0.5 / n);
  for (MpsTensor& t : s.tensors) {
    for (Amp& x : t.data) x *= scale;
  }
  return MpsState::validated(n, std::move(s.tensors));
}

}  // namespace qcert
