// Matrix product state representation backing the efficient target oracle.
#pragma once

#include <span>
#include <vector>

#include "qcert/qmath.hpp"
#include "qcert/rng.hpp"

namespace qcert {

// One site tensor A[a][s][b] with left bond a, physical index s in {0,1},
// right bond b; stored row-major as data[(a * 2 + s) * chi_right + b].
struct MpsTensor {
  int chi_left = 1;
  int chi_right = 1;
  std::vector<Amp> data;

  Amp at(int a, int s, int b) const {
    return data[(static_cast<std::size_t>(a) * 2 + s) * chi_right + b];
  }
};

// Bond-dimension-bounded tensor chain; chi_0 = chi_n = 1 and the chain
// contracts with itself to 1 (validated by `validated`).
struct MpsState {
  int n = 0;
  std::vector<MpsTensor> tensors;

  // Checks chain consistency and global normalization; throws ContractError.
  static MpsState validated(int n, std::vector<MpsTensor> tensors);
};

double mps_norm_sq(const MpsState& s);
int max_bond_dimension(const MpsState& s);

// Dense amplitudes (big-endian, site 1 first); throws CapacityError above cap.
StateVector mps_to_dense(const MpsState& s, int dense_cap = 24);

MpsState mps_product_state(std::span<const Qubit1> factors);
MpsState mps_ghz(int n);

// Random normalized chain with chi_i = min(chi_max, 2^i, 2^(n-i)).
MpsState random_mps(int n, int chi_max, PhiloxRng& rng);

}  // namespace qcert
