#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcert/oracle.hpp"
#include "qcert/parallel.hpp"
#include "testutil.hpp"

using namespace qcert;
namespace tu = qcert::testutil;

namespace {

ProductProjectorQuery random_query(int n, PhiloxRng& rng, double project_prob = 0.6) {
  ProductProjectorQuery q = ProductProjectorQuery::all_identity(n);
  for (int i = 1; i <= n; ++i) {
    if (rng.uniform() < project_prob) q.set(i, tu::random_qubit(rng));
  }
  return q;
}

bool density_close(const Density1Q& a, const Density1Q& b, double eps = tol::kValidate) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(a.m[i] - b.m[i]) > eps) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("dense query basics") {
  const StateVector zeros = tu::zero_n(3);
  CHECK(dense_query(zeros, ProductProjectorQuery::all_identity(3)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const StateVector ps = product_state(std::array<Qubit1, 2>{kKetPlus, kKet0});
  ProductProjectorQuery q = ProductProjectorQuery::all_identity(2);
  q.set(1, kKet0);
  CHECK(dense_query(ps, q) == doctest::Approx(0.5).epsilon(1e-12));

  ProductProjectorQuery qb = ProductProjectorQuery::all_identity(2);
  qb.set(1, kKet0).set(2, kKetPlus);
  CHECK(dense_query(tu::bell(), qb) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("query validation") {
  const StateVector s = tu::bell();
  ProductProjectorQuery wrong = ProductProjectorQuery::all_identity(3);
  CHECK_THROWS_AS(dense_query(s, wrong), ContractError);

  ProductProjectorQuery bad = ProductProjectorQuery::all_identity(2);
  bad.factors[0] = ProjectorFactor::onto({Amp(1, 0), Amp(1, 0)});
  CHECK_THROWS_AS(dense_query(s, bad), ContractError);
}

TEST_CASE("projector monotonicity") {
  PhiloxRng rng(201);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(5));
    const StateVector s = tu::haar_state(n, rng);
    ProductProjectorQuery q = random_query(n, rng, 0.4);
    const double before = dense_query(s, q);
    // add one more projector at a currently free slot, if any
    std::vector<int> free;
    for (int i = 1; i <= n; ++i) {
      if (q.factors[i - 1].is_identity()) free.push_back(i);
    }
    if (free.empty()) continue;
    q.set(free[rng.uniform_below(free.size())], tu::random_qubit(rng));
    const double after = dense_query(s, q);
    CHECK(after <= before + tol::kExact);
  }
}

TEST_CASE("oracle clamps and counts") {
  DenseOracle oracle(tu::bell());
  ProductProjectorQuery q = ProductProjectorQuery::all_identity(2);
  CHECK(oracle.query_count() == 0);
  const double v = oracle.query(q);
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
  CHECK(oracle.query_count() == 1);

  // Concurrent counting stays exact.
  parallel_for(500, [&](uint64_t) { oracle.query(q); });
  CHECK(oracle.query_count() == 501);
}

TEST_CASE("counting view tracks per-run queries") {
  DenseOracle shared(tu::bell());
  const ProductProjectorQuery q = ProductProjectorQuery::all_identity(2);
  shared.query(q);
  CountingOracleView view(shared);
  view.query(q);
  view.query(q);
  CHECK(view.query_count() == 2);
  CHECK(shared.query_count() == 3);
}

TEST_CASE("mps query on analytic states") {
  const MpsState zeros = mps_product_state(std::vector<Qubit1>(4, kKet0));
  CHECK(mps_query(zeros, ProductProjectorQuery::all_identity(4)) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const MpsState ghz = mps_ghz(5);
  ProductProjectorQuery q = ProductProjectorQuery::all_identity(5);
  q.set(1, kKet0);
  CHECK(mps_query(ghz, q) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("mps validation") {
  std::vector<MpsTensor> chain;
  chain.push_back(MpsTensor{1, 2, std::vector<Amp>(4, Amp(0.5, 0))});
  chain.push_back(MpsTensor{3, 1, std::vector<Amp>(6, Amp(0.5, 0))});  // 3 != 2
  CHECK_THROWS_AS(MpsState::validated(2, std::move(chain)), ContractError);

  std::vector<MpsTensor> unnorm;
  unnorm.push_back(MpsTensor{1, 1, {Amp(2, 0), Amp(0, 0)}});
  CHECK_THROWS_AS(MpsState::validated(1, std::move(unnorm)), ContractError);
}

TEST_CASE("mps_to_dense matches analytic states") {
  const StateVector g = mps_to_dense(mps_ghz(6));
  const StateVector want = tu::ghz(6);
  for (std::size_t i = 0; i < g.amps.size(); ++i) {
    CHECK(std::abs(g.amps[i] - want.amps[i]) < 1e-9);
  }
  CHECK_THROWS_AS(mps_to_dense(mps_ghz(8), 6), CapacityError);
}

TEST_CASE("mps backend agrees with dense backend on random instances") {
  PhiloxRng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(9));  // up to 10
    const int chi = 1 + static_cast<int>(rng.uniform_below(4));
    const MpsState mps = random_mps(n, chi, rng);
    CHECK(std::abs(mps_norm_sq(mps) - 1.0) < tol::kValidate);
    CHECK(max_bond_dimension(mps) <= 4);
    const StateVector dense = mps_to_dense(mps);
    const ProductProjectorQuery q = random_query(n, rng);
    CHECK(std::abs(mps_query(mps, q) - dense_query(dense, q)) < tol::kValidate);
  }
}

TEST_CASE("reconstruct: product and Bell branches") {
  DenseOracle prod(product_state(std::array<Qubit1, 2>{kKet0, kKetPlus}));
  const auto r =
      reconstruct_conditional_qubit(prod, ProductProjectorQuery::all_identity(2), 1);
  CHECK(r.prob_mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(density_close(r.rho, density_of_pure(kKet0)));

  DenseOracle bell(tu::bell());
  ProductProjectorQuery base = ProductProjectorQuery::all_identity(2);
  base.set(1, kKet0);
  const auto rb = reconstruct_conditional_qubit(bell, base, 2);
  CHECK(rb.prob_mass == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(density_close(rb.rho, density_of_pure(kKet0)));
}

TEST_CASE("reconstruct issues exactly 4 queries (3 with known mass)") {
  DenseOracle oracle(tu::bell());
  const ProductProjectorQuery base = ProductProjectorQuery::all_identity(2);
  const uint64_t before = oracle.query_count();
  reconstruct_conditional_qubit(oracle, base, 1);
  CHECK(oracle.query_count() - before == 4);
  reconstruct_conditional_qubit(oracle, base, 1, 1.0);
  CHECK(oracle.query_count() - before == 7);
}

TEST_CASE("reconstruct agrees with dense conditioning on random instances") {
  PhiloxRng rng(203);
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector s = tu::haar_state(4, rng);
    DenseOracle oracle(s);

    // random computational prefix of length t in [0, 3]
    const int t = static_cast<int>(rng.uniform_below(4));
    ProductProjectorQuery base = ProductProjectorQuery::all_identity(4);
    SubnormalizedVector cond = as_subnormalized(s);
    bool dead = false;
    for (int j = 1; j <= t; ++j) {
      const int bit = static_cast<int>(rng.uniform_below(2));
      base.set(j, bit ? kKet1 : kKet0);
      const Conditioned c = condition(cond, 1, bit ? kKet1 : kKet0);
      cond = c.residual;
      if (c.prob <= tol::kDegenerate) dead = true;
    }
    if (dead) continue;

    const auto rec = reconstruct_conditional_qubit(oracle, base, t + 1);
    const Reduced1Q direct = reduced_density_1q(cond, 1);
    CHECK(std::abs(rec.prob_mass - direct.prob_mass) < tol::kValidate);
    CHECK(density_close(rec.rho, direct.rho));
  }
}

TEST_CASE("mps oracle enforces its bond cap") {
  PhiloxRng rng(204);
  const MpsState wide = random_mps(6, 4, rng);
  CHECK_THROWS_AS(MpsOracle(wide, 2), CapacityError);
  MpsOracle ok(wide, 4);
  CHECK(ok.query(ProductProjectorQuery::all_identity(6)) == doctest::Approx(1.0));
}

TEST_CASE("reconstruct rejects degenerate branches") {
  DenseOracle oracle(tu::zero_n(2));
  ProductProjectorQuery base = ProductProjectorQuery::all_identity(2);
  base.set(1, kKet1);  // zero-mass branch of |00>
  CHECK_THROWS_AS(reconstruct_conditional_qubit(oracle, base, 2), DegenerateBranchError);
  // base must hold Identity at the reconstructed qubit
  CHECK_THROWS_AS(reconstruct_conditional_qubit(oracle, base, 1), ContractError);
}
