#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "symdecomp/decomp.hpp"
#include "symdecomp/errors.hpp"
#include "symdecomp/symstate.hpp"

using namespace symdecomp;

namespace {

SymmetricState ghz(int n) {
  std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0));
  c[0] = 1.0 / std::sqrt(2.0);
  c[static_cast<size_t>(n)] = 1.0 / std::sqrt(2.0);
  return SymmetricState(n, std::move(c));
}

SymmetricState dicke(int n, int k) {
  std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0));
  c[static_cast<size_t>(k)] = 1.0;
  return SymmetricState(n, std::move(c));
}

// Superpose normalized coherent terms with the given weights.
SymmetricState synth(int n, const std::vector<cplx>& w, const std::vector<NodeState>& nodes) {
  std::vector<cplx> acc(static_cast<size_t>(n) + 1, cplx(0.0));
  for (size_t m = 0; m < w.size(); ++m) {
    SymmetricState cs = coherent_state(n, nodes[m]);
    for (int k = 0; k <= n; ++k) acc[static_cast<size_t>(k)] += w[m] * cs[k];
  }
  return SymmetricState(n, std::move(acc)).normalized();
}

bool node_in(const std::vector<DecompositionTerm>& terms, const NodeState& target, double tol) {
  for (const auto& t : terms)
    if (chordal(t.node, target) < tol) return true;
  return false;
}

double fidelity_deficit(const CoherentDecomposition& d, const SymmetricState& s) {
  SymmetricState r = reconstruct(d).state.normalized();
  return std::abs(1.0 - std::abs(overlap(r, s.normalized())));
}

} // namespace

TEST_CASE("three qubit cat state splits into two opposite product terms") {
  auto [d, diag] = decompose(ghz(3));
  REQUIRE(d.terms.size() == 2);
  CHECK(d.parity == Parity::Odd);
  CHECK(std::abs(std::abs(d.A()) - 1.0 / std::sqrt(2.0)) < 1e-10);
  CHECK(d.y()[1] == doctest::Approx(1.0).epsilon(1e-10));
  // the two directions are orthogonal product states (poles of the sphere)
  cplx ov = node_overlap(d.terms[0].node, d.terms[1].node);
  CHECK(std::abs(ov) < 1e-10);
  CHECK(node_in(d.terms, NodeState::from_angles(0.0, 0.0), 1e-8));
  CHECK(node_in(d.terms, NodeState::from_angles(kPi, 0.0), 1e-8));
  CHECK(diag.reconstruction_fidelity_deficit < 1e-10);
  CHECK(fidelity_deficit(d, ghz(3)) < 1e-10);
}

TEST_CASE("even cat state keeps its diametric pair in front") {
  for (int n : {4, 6, 8}) {
    auto [d, diag] = decompose(ghz(n));
    REQUIRE(d.terms.size() >= 2);
    CHECK(d.parity == Parity::Even);
    CHECK(chordal(antipode(d.terms[0].node.beta()), d.terms[1].node.beta()) < 1e-7);
    CHECK(diag.reconstruction_fidelity_deficit < 1e-9);
  }
}

TEST_CASE("a coherent state comes back as a single term") {
  NodeState node = NodeState::from_angles(1.1, -0.7);
  for (int n : {3, 4, 5, 6}) {
    auto [d, diag] = decompose(coherent_state(n, node));
    REQUIRE(d.terms.size() == 1);
    CHECK(chordal(d.terms[0].node, node) < 1e-8);
    CHECK(std::abs(std::abs(d.terms[0].c) - 1.0) < 1e-9);
    CHECK(diag.reconstruction_fidelity_deficit < 1e-10);
  }
}

TEST_CASE("random states round trip through the expansion") {
  // For n divisible by four a slice of state space admits no expansion with a
  // diametric pair (the pair condition map has zero topological degree there
  // and its roots can vanish outright); such draws are rejected honestly and
  // resampled here. Observed rejection rates: ~16% (n=4), ~5% (n=8), ~1% (n=12).
  std::mt19937_64 rng(101);
  for (int n = 3; n <= 12; ++n) {
    int done = 0, attempts = 0;
    while (done < 6) {
      REQUIRE(++attempts <= 60);
      SymmetricState s = random_state(n, rng);
      CoherentDecomposition d;
      DecompositionDiagnostics diag;
      try {
        std::tie(d, diag) = decompose(s);
      } catch (const DecompositionError& e) {
        CHECK(e.fault() == Fault::NonGeneric);
        CHECK(n % 4 == 0); // only the degree-zero parity class may refuse
        continue;
      }
      ++done;
      size_t bound = (n % 2 == 1) ? static_cast<size_t>((n + 1) / 2)
                                  : static_cast<size_t>(n / 2 + 1);
      CHECK(d.terms.size() <= bound);
      CHECK(diag.reconstruction_fidelity_deficit < 1e-9);
      CHECK(fidelity_deficit(d, s) < 1e-8);
      // ordering contract: weights never increase, except that an even
      // expansion pins its diametric pair to the first two slots
      size_t start = (n % 2 == 0) ? 2 : 1;
      if (d.terms.size() >= 2)
        CHECK(std::abs(d.terms[0].c) >= std::abs(d.terms[1].c) - 1e-12);
      for (size_t m = start; m + 1 < d.terms.size(); ++m)
        CHECK(std::abs(d.terms[m].c) >= std::abs(d.terms[m + 1].c) - 1e-12);
    }
  }
}

TEST_CASE("known odd constellations are recovered exactly") {
  std::vector<NodeState> nodes = {NodeState::from_angles(0.4, 0.3),
                                  NodeState::from_angles(1.9, 2.2),
                                  NodeState::from_angles(2.6, -1.4)};
  std::vector<cplx> w = {cplx(0.9, 0.1), cplx(-0.5, 0.4), cplx(0.3, -0.8)};
  SymmetricState s = synth(5, w, nodes);
  auto [d, diag] = decompose(s);
  REQUIRE(d.terms.size() == 3);
  for (const auto& node : nodes) CHECK(node_in(d.terms, node, 1e-7));
  CHECK(diag.reconstruction_fidelity_deficit < 1e-10);
}

TEST_CASE("known even constellations with a diametric pair are recovered") {
  // n = 6: one antipodal pair plus two free nodes, K = n/2 + 1 = 4 terms
  NodeState p0 = NodeState::from_angles(0.8, 0.5);
  NodeState p1 = NodeState::from_beta(antipode(p0.beta()));
  std::vector<NodeState> nodes = {p0, p1, NodeState::from_angles(2.1, -0.9),
                                  NodeState::from_angles(1.3, 2.8)};
  std::vector<cplx> w = {cplx(0.8, -0.2), cplx(0.5, 0.3), cplx(-0.4, 0.5), cplx(0.25, 0.6)};
  SymmetricState s = synth(6, w, nodes);
  // the planted constellation need not carry the largest leading weight, but
  // it must appear among the admissible solutions
  std::vector<CoherentDecomposition> all = all_decompositions(s);
  bool planted_found = false;
  for (const auto& d : all) {
    REQUIRE(d.terms.size() == 4);
    CHECK(chordal(antipode(d.terms[0].node.beta()), d.terms[1].node.beta()) < 1e-6);
    CHECK(fidelity_deficit(d, s) < 1e-8);
    bool match = true;
    for (const auto& node : nodes) match = match && node_in(d.terms, node, 1e-6);
    planted_found = planted_found || match;
  }
  CHECK(planted_found);
  auto [d, diag] = decompose(s);
  CHECK(diag.reconstruction_fidelity_deficit < 1e-9);
}

TEST_CASE("degenerate symmetric basis states are refused") {
  // multiplicity above the parity bound
  CHECK_THROWS_AS(decompose(dicke(3, 1)), DecompositionError);
  CHECK_THROWS_AS(decompose(dicke(8, 6)), DecompositionError);
  CHECK_THROWS_AS(decompose(dicke(7, 3)), DecompositionError);
  // half filling passes the multiplicity gate but admits no diametric pair
  // (or admits a continuum), so it must still be rejected
  for (int n : {2, 4, 6, 8}) {
    try {
      decompose(dicke(n, n / 2));
      FAIL("expected rejection for n = " << n);
    } catch (const DecompositionError& e) {
      CHECK(e.fault() == Fault::NonGeneric);
    }
  }
}

TEST_CASE("expansion does not depend on the dodge frame seed") {
  std::mt19937_64 rng(303);
  for (int n : {5, 6}) {
    SymmetricState s = random_state(n, rng);
    DecomposeOptions a, b;
    a.seed = 1;
    b.seed = 99991;
    auto [da, ia] = decompose(s, a);
    auto [db, ib] = decompose(s, b);
    REQUIRE(da.terms.size() == db.terms.size());
    for (size_t m = 0; m < da.terms.size(); ++m) {
      CHECK(std::abs(da.terms[m].c - db.terms[m].c) < 1e-7);
      CHECK(chordal(da.terms[m].node, db.terms[m].node) < 1e-7);
    }
  }
}

TEST_CASE("interpolation conditions hold and detect tampering") {
  std::mt19937_64 rng(404);
  SymmetricState s = random_state(7, rng);
  auto [d, diag] = decompose(s);
  CHECK(diag.max_root_residual < 1e-8);
  CHECK(diag.max_determinant_residual < 1e-8);
  CHECK(diag.value_at_zero_residual < 1e-8);

  // nudge one direction: the root conditions must notice
  CoherentDecomposition bad = d;
  NodeState old = bad.terms[0].node;
  bad.terms[0].node = NodeState::from_angles(old.theta() + 1e-3, old.phi());
  DecompositionDiagnostics tampered = verify_expansion_conditions(bad, s);
  CHECK(tampered.max_root_residual > 1e-5);
}

TEST_CASE("moment sequence matches the weight and direction data") {
  std::mt19937_64 rng(505);
  SymmetricState s = random_state(9, rng);
  auto [d, diag] = decompose(s);
  MomentVector mv = moments(s.normalized());
  // mu_k = sum_m w_m beta_m^k with w_m = c_m / (1+|beta_m|^2)^{n/2}
  for (int k = 0; k <= 9; ++k) {
    cplx acc(0.0);
    for (const auto& t : d.terms) {
      cplx beta = t.node.beta().value();
      double norm = std::pow(1.0 + std::norm(beta), 4.5);
      acc += t.c / norm * std::pow(beta, k);
    }
    CHECK(std::abs(acc - mv.mu[static_cast<size_t>(k)]) < 1e-8);
  }
}

TEST_CASE("every admissible even solution reconstructs the state") {
  std::mt19937_64 rng(606);
  SymmetricState s = random_state(6, rng);
  std::vector<CoherentDecomposition> all = all_decompositions(s);
  REQUIRE(!all.empty());
  for (const auto& d : all) {
    CHECK(fidelity_deficit(d, s) < 1e-8);
    CHECK(chordal(antipode(d.terms[0].node.beta()), d.terms[1].node.beta()) < 1e-6);
  }
  // solutions are ordered by the leading weight
  for (size_t i = 1; i < all.size(); ++i)
    CHECK(std::abs(all[i - 1].terms[0].c) >= std::abs(all[i].terms[0].c) - 1e-9);
}

TEST_CASE("two qubit states expose the expansion ambiguity honestly") {
  // |00> + |11> style states admit a one parameter family of pairs; the
  // solver must refuse rather than pick one silently
  SymmetricState bell(2, {cplx(1.0 / std::sqrt(2.0)), cplx(0.0), cplx(1.0 / std::sqrt(2.0))});
  try {
    decompose(bell);
    // acceptable only if a unique pair was found; check it reconstructs
    auto [d, diag] = decompose(bell);
    CHECK(diag.reconstruction_fidelity_deficit < 1e-9);
  } catch (const DecompositionError& e) {
    CHECK(e.fault() == Fault::NonGeneric);
  }
}

TEST_CASE("perturbing a basis state restores genericity") {
  // dicke(6,3) alone is rejected; an asymmetric perturbation moves the roots
  // apart and the expansion succeeds. (A perturbation along |0...0> alone
  // would keep a threefold rotation symmetry and a genuinely tied solution
  // set, so break the symmetry with two components.)
  std::vector<cplx> c(7, cplx(0.0));
  c[3] = 1.0;
  c[0] = 0.05;
  c[1] = cplx(0.03, 0.02);
  SymmetricState s(6, std::move(c));
  auto [d, diag] = decompose(s);
  CHECK(diag.reconstruction_fidelity_deficit < 1e-9);
  CHECK(d.terms.size() <= 4);
}
