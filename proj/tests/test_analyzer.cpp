#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcert/analyzer.hpp"
#include "testutil.hpp"

using namespace qcert;
namespace tu = qcert::testutil;

namespace {

struct SubtestInstance {
  StateVector lab;
  StateVector tar;
  DtTree tree;
};

SubtestInstance random_subtest_instance(int m, PhiloxRng& rng, bool product_lab = false) {
  SubtestInstance inst{product_lab ? tu::random_product(m, rng) : tu::haar_state(m, rng),
                       tu::haar_state(m, rng), DtTree{}};
  const Conditioned t0 = condition(inst.tar, 1, kKet0);
  const Conditioned t1 = condition(inst.tar, 1, kKet1);
  inst.tree = build_phase_tree(t0.residual, t1.residual);
  return inst;
}

// Direct evaluation of |a1 <U0|v0> - a0 <U1|v1>|^2 from first principles.
double gap_closed_form(const StateVector& lab, const StateVector& tar) {
  const Conditioned u0 = condition(tar, 1, kKet0);
  const Conditioned u1 = condition(tar, 1, kKet1);
  const Conditioned v0 = condition(lab, 1, kKet0);
  const Conditioned v1 = condition(lab, 1, kKet1);
  const double a0 = std::sqrt(u0.prob);
  const double a1 = std::sqrt(u1.prob);
  const Amp t0 = a0 > 1e-9 ? overlap(u0.residual, v0.residual) / a0 : Amp(0, 0);
  const Amp t1 = a1 > 1e-9 ? overlap(u1.residual, v1.residual) / a1 : Amp(0, 0);
  return std::norm(a1 * t0 - a0 * t1);
}

}  // namespace

TEST_CASE("exact distribution: identical states accept with certainty") {
  PhiloxRng rng(401);
  for (int n = 1; n <= 5; ++n) {
    const StateVector s = tu::haar_state(n, rng);
    const ExactDistribution d = exact_distribution(s, s);
    CHECK(d.p_accept == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.p_reject <= 1e-9);
  }
}

TEST_CASE("exact distribution: single qubit against |0>") {
  const StateVector plus(1, {Amp(std::sqrt(0.5), 0), Amp(std::sqrt(0.5), 0)});
  const ExactDistribution d = exact_distribution(plus, tu::zero_n(1));
  CHECK(d.p_accept == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.p_reject == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("exact distribution: probabilities sum to one, rows to totals") {
  PhiloxRng rng(402);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(6));
    StateVector lab = trial % 4 == 0 ? tu::sparse_state(n, std::min(3, 1 << n), rng)
                                     : tu::haar_state(n, rng);
    const StateVector tar = trial % 3 == 0 ? tu::ghz(std::max(n, 2)) : tu::haar_state(n, rng);
    if (tar.n != lab.n) continue;
    const ExactDistribution d = exact_distribution(lab, tar);
    CHECK(std::abs(d.p_accept + d.p_reject - 1.0) <= tol::kValidate);
    double acc = 0, rej = 0;
    for (const ExactRow& row : d.rows) {
      acc += row.p_accept;
      rej += row.p_reject;
      CHECK(row.p_accept >= -tol::kExact);
      CHECK(row.p_reject >= -tol::kExact);
    }
    CHECK(std::abs(acc - d.p_accept) <= 1e-12);
    CHECK(std::abs(rej - d.p_reject) <= 1e-12);
  }
}

TEST_CASE("exact distribution respects the analyzer cap") {
  PhiloxRng rng(403);
  const StateVector s = tu::haar_state(4, rng);
  CHECK_THROWS_AS(exact_distribution(s, s, 3), CapacityError);
}

TEST_CASE("accept/reject bounds hold exactly") {
  PhiloxRng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(6));
    const StateVector tar = tu::haar_state(n, rng);
    StateVector lab = tu::haar_state(n, rng);
    if (trial % 3 == 0) lab = tu::rotate_toward(tar, 0.9, rng);
    const double f = tu::fid(tar, lab);
    const ExactDistribution d = exact_distribution(lab, tar);
    CHECK(d.p_accept >= f - tol::kValidate);
    CHECK(d.p_reject >= (1.0 - f) / n - tol::kValidate);
  }
}

TEST_CASE("dual route: enumeration equals the closed-form assembly") {
  const ExactDistribution d = exact_distribution(tu::plus_n(2), tu::bell());
  const double closed = closed_form_accept_probability(tu::plus_n(2), tu::bell());
  CHECK(std::abs(d.p_accept - closed) <= tol::kValidate);

  PhiloxRng rng(405);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(5));
    const StateVector lab = trial % 2 ? tu::haar_state(n, rng) : tu::random_product(n, rng);
    const StateVector tar = tu::haar_state(n, rng);
    const ExactDistribution d2 = exact_distribution(lab, tar);
    CHECK(std::abs(d2.p_accept - closed_form_accept_probability(lab, tar)) <= tol::kValidate);
  }
}

TEST_CASE("fidelity gap: identical branches") {
  PhiloxRng rng(406);
  const StateVector s = tu::haar_state(3, rng);
  CHECK(std::abs(fidelity_gap(as_subnormalized(s), as_subnormalized(s))) <= tol::kValidate);
}

TEST_CASE("fidelity gap: Bell target against |00>") {
  const SubnormalizedVector lab = as_subnormalized(tu::zero_n(2));
  const SubnormalizedVector tar = as_subnormalized(tu::bell());
  const double gap = fidelity_gap(lab, tar);
  CHECK(gap == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gap == doctest::Approx(gap_closed_form(tu::zero_n(2), tu::bell())).epsilon(1e-12));
}

TEST_CASE("fidelity gap: nonnegative, equals its closed form") {
  PhiloxRng rng(407);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_below(5));
    const StateVector lab = tu::haar_state(m, rng);
    const StateVector tar = tu::haar_state(m, rng);
    const double gap = fidelity_gap(as_subnormalized(lab), as_subnormalized(tar));
    CHECK(gap >= -tol::kExact);
    CHECK(std::abs(gap - gap_closed_form(lab, tar)) <= tol::kValidate);
  }
}

TEST_CASE("fidelity gap: zero-mass lab branch throws") {
  SubnormalizedVector dead;
  dead.n = 2;
  dead.amps.assign(4, Amp(0, 0));
  CHECK_THROWS_AS(fidelity_gap(dead, as_subnormalized(tu::bell())), DegenerateBranchError);
}

TEST_CASE("phi sequence: identical states") {
  PhiloxRng rng(408);
  const StateVector s = tu::haar_state(4, rng);
  for (const double phi : phi_sequence(s, s)) {
    CHECK(phi == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("phi sequence: plus-pair lab against |00> target") {
  // Dead target branches contribute overlap zero, so every level stays at the
  // unconditioned fidelity 1/4.
  const std::vector<double> phi = phi_sequence(tu::plus_n(2), tu::zero_n(2));
  REQUIRE(phi.size() == 3);
  CHECK(phi[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(phi[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(phi[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gap expectation telescopes through the phi sequence") {
  PhiloxRng rng(409);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(6));
    const StateVector lab = trial % 4 == 0 ? tu::sparse_state(n, 2, rng) : tu::haar_state(n, rng);
    const StateVector tar = trial % 5 == 0 ? tu::zero_n(n) : tu::haar_state(n, rng);
    const std::vector<double> phi = phi_sequence(lab, tar);
    const double mean_gap = expected_fidelity_gap(lab, tar);
    CHECK(std::abs(mean_gap - (phi[n] - phi[0]) / n) <= tol::kValidate);
  }
}

TEST_CASE("gap expectation equals infidelity/n on full-support instances") {
  PhiloxRng rng(410);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(6));
    const StateVector tar = tu::haar_state(n, rng);  // full support almost surely
    const StateVector lab = trial % 2 ? tu::haar_state(n, rng) : tu::random_product(n, rng);
    if (!full_target_support(lab, tar)) continue;
    ++checked;
    const double f = tu::fid(tar, lab);
    CHECK(std::abs(expected_fidelity_gap(lab, tar) - (1.0 - f) / n) <= tol::kValidate);
  }
  CHECK(checked >= 30);
}

TEST_CASE("full-support checker") {
  PhiloxRng rng(411);
  CHECK(full_target_support(tu::plus_n(2), tu::haar_state(2, rng)));
  CHECK_FALSE(full_target_support(tu::plus_n(2), tu::zero_n(2)));
}

TEST_CASE("subtest closed form: identical states accept") {
  PhiloxRng rng(412);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_below(5));
    SubtestInstance inst = random_subtest_instance(m, rng);
    const SubtestDecomposition dec = decompose_subtest(inst.tar, inst.tar, inst.tree);
    const SubtestProbs p = subtest_closed_form(dec);
    CHECK(p.p_accept == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.p_reject <= 1e-9);
  }
}

TEST_CASE("subtest closed form: Bell target, |00> lab") {
  const StateVector tar = tu::bell();
  const StateVector lab = tu::zero_n(2);
  const Conditioned t0 = condition(tar, 1, kKet0);
  const Conditioned t1 = condition(tar, 1, kKet1);
  const DtTree tree = build_phase_tree(t0.residual, t1.residual);
  const SubtestDecomposition dec = decompose_subtest(lab, tar, tree);
  CHECK(dec.a0 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(dec.a1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  const SubtestProbs p = subtest_closed_form(dec);
  CHECK(p.p_accept == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.p_reject == doctest::Approx(0.5).epsilon(1e-9));
  // Both bounds are tight here.
  CHECK(p.p_accept == doctest::Approx(tu::fid(tar, lab)).epsilon(1e-9));
  CHECK(p.p_reject ==
        doctest::Approx(fidelity_gap(as_subnormalized(lab), as_subnormalized(tar))).epsilon(1e-9));
}

TEST_CASE("subtest decomposition invariants") {
  PhiloxRng rng(413);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_below(5));
    const SubtestInstance inst = random_subtest_instance(m, rng);
    const SubtestDecomposition dec = decompose_subtest(inst.lab, inst.tar, inst.tree);
    CHECK(std::abs(dec.a0 * dec.a0 + dec.a1 * dec.a1 - 1.0) <= tol::kValidate);
    double vnorm = 0;
    for (const Amp& a : dec.v0) vnorm += std::norm(a);
    for (const Amp& a : dec.vtilde1) vnorm += std::norm(a);
    CHECK(std::abs(vnorm - 1.0) <= tol::kValidate);
    for (const Amp& z : dec.zetas) CHECK(std::abs(std::abs(z) - 1.0) <= tol::kValidate);
  }
}

TEST_CASE("subtest closed form equals enumeration; probabilities sum to one") {
  PhiloxRng rng(414);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_below(5));
    const SubtestInstance inst = random_subtest_instance(m, rng, trial % 3 == 0);
    const SubtestDecomposition dec = decompose_subtest(inst.lab, inst.tar, inst.tree);
    const SubtestProbs closed = subtest_closed_form(dec);
    const SubtestProbs exact = exact_subtest_distribution(inst.lab, inst.tar, inst.tree);
    CHECK(std::abs(closed.p_accept - exact.p_accept) <= tol::kValidate);
    CHECK(std::abs(closed.p_reject - exact.p_reject) <= tol::kValidate);
    CHECK(std::abs(closed.p_accept + closed.p_reject - 1.0) <= tol::kValidate);
  }
}

TEST_CASE("subtest bounds and the Cauchy-Schwarz chain") {
  PhiloxRng rng(415);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_below(5));
    const SubtestInstance inst = random_subtest_instance(m, rng);
    const SubtestDecomposition dec = decompose_subtest(inst.lab, inst.tar, inst.tree);
    const SubtestProbs p = subtest_closed_form(dec);
    const double f = tu::fid(inst.tar, inst.lab);
    const double gap = fidelity_gap(as_subnormalized(inst.lab), as_subnormalized(inst.tar));
    CHECK(p.p_accept >= f - tol::kValidate);
    CHECK(p.p_reject >= gap - tol::kValidate);
  }
}

TEST_CASE("single-qubit subtest reduces to the Born rule") {
  PhiloxRng rng(416);
  for (int trial = 0; trial < 50; ++trial) {
    const SubtestInstance inst = random_subtest_instance(1, rng);
    const SubtestDecomposition dec = decompose_subtest(inst.lab, inst.tar, inst.tree);
    const SubtestProbs p = subtest_closed_form(dec);
    CHECK(p.p_accept == doctest::Approx(tu::fid(inst.tar, inst.lab)).epsilon(1e-9));
  }
}
