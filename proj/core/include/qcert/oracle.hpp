// Product-projector access to a target state: dense and MPS backends plus
// three-probe reconstruction of conditional single-qubit states.
#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "qcert/mps.hpp"
#include "qcert/qmath.hpp"

namespace qcert {

// One tensor factor of a query: Identity or a rank-1 projector |w><w|.
struct ProjectorFactor {
  std::optional<Qubit1> project;  // nullopt = Identity

  bool is_identity() const { return !project.has_value(); }
  static ProjectorFactor identity() { return {}; }
  static ProjectorFactor onto(const Qubit1& w) { return {w}; }
};

// Tensor product of single-qubit projectors, one factor per qubit.
struct ProductProjectorQuery {
  std::vector<ProjectorFactor> factors;

  int n() const { return static_cast<int>(factors.size()); }
  static ProductProjectorQuery all_identity(int n);

  // 1-based qubit index.
  ProductProjectorQuery& set(int qubit, const Qubit1& w);
  ProductProjectorQuery& clear(int qubit);
  int projected_count() const;
};

// Read-only oracle returning <psi|Pi|psi> for product-projector queries.
// Values are clamped to [0, 1] after a tolerance check. The query counter is
// monotone and safe to read concurrently; increments may interleave but the
// final total is exact.
class TargetOracle {
 public:
  virtual ~TargetOracle() = default;
  virtual int qubit_count() const = 0;

  double query(const ProductProjectorQuery& q);
  uint64_t query_count() const { return query_count_.load(std::memory_order_relaxed); }

 protected:
  virtual double evaluate(const ProductProjectorQuery& q) const = 0;

 private:
  std::atomic<uint64_t> query_count_{0};
};

// Exact dense backend, O(2^n) per query.
class DenseOracle final : public TargetOracle {
 public:
  explicit DenseOracle(StateVector state) : state_(std::move(state)) {}
  int qubit_count() const override { return state_.n; }
  const StateVector& state() const { return state_; }

 protected:
  double evaluate(const ProductProjectorQuery& q) const override;

 private:
  StateVector state_;
};

// Tensor-chain backend, O(n * chi^3) per query.
class MpsOracle final : public TargetOracle {
 public:
  explicit MpsOracle(MpsState state, int chi_cap = 0);  // chi_cap > 0 enforces a bond limit
  int qubit_count() const override { return state_.n; }
  const MpsState& state() const { return state_; }

 protected:
  double evaluate(const ProductProjectorQuery& q) const override;

 private:
  MpsState state_;
};

// Per-run counting wrapper around a shared oracle; forwards queries and
// keeps a local tally while the inner oracle keeps the global one.
class CountingOracleView final : public TargetOracle {
 public:
  explicit CountingOracleView(TargetOracle& inner) : inner_(&inner) {}
  int qubit_count() const override { return inner_->qubit_count(); }

 protected:
  double evaluate(const ProductProjectorQuery& q) const override { return inner_->query(q); }

 private:
  TargetOracle* inner_;
};

double dense_query(StateView state, const ProductProjectorQuery& q);
double mps_query(const MpsState& state, const ProductProjectorQuery& q);

struct ConditionalQubit {
  double prob_mass = 0;
  Density1Q rho;
};

// Bloch reconstruction of the state of `qubit` conditioned on the projectors
// in `base` (which must hold Identity at `qubit`). Probes |0>, |+>, |i> and
// the normalizer: exactly 4 queries. The overload taking `known_mass` skips
// the normalizer (3 queries). Throws DegenerateBranchError when the
// conditional mass is at or below the degenerate threshold.
ConditionalQubit reconstruct_conditional_qubit(TargetOracle& oracle,
                                               const ProductProjectorQuery& base, int qubit);
ConditionalQubit reconstruct_conditional_qubit(TargetOracle& oracle,
                                               const ProductProjectorQuery& base, int qubit,
                                               double known_mass);

}  // namespace qcert
