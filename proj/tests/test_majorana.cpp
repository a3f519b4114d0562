#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "symdecomp/majorana.hpp"

using namespace symdecomp;

namespace {

SymmetricState ghz(int n) {
  std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0));
  c.front() = 1.0 / std::sqrt(2.0);
  c.back() = 1.0 / std::sqrt(2.0);
  return SymmetricState(n, c);
}

SymmetricState dicke(int n, int k) {
  std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0));
  c[static_cast<size_t>(k)] = 1.0;
  return SymmetricState(n, c);
}

bool holds(const RootMultiset& rm, const ExtComplex& where, int mult, double tol) {
  for (const auto& e : rm.roots)
    if (chordal(e.location, where) < tol && e.multiplicity == mult) return true;
  return false;
}

} // namespace

TEST_CASE("stellar coefficients carry the combinatorial weights") {
  MajoranaPoly p = majorana_polynomial(dicke(3, 1));
  CHECK(std::abs(p.coeffs[1] - cplx(std::sqrt(3.0))) < 1e-15);
  CHECK(std::abs(p.coeffs[0]) == 0.0);
  CHECK(std::abs(p.coeffs[2]) == 0.0);
}

TEST_CASE("three-qubit parity-balanced state has the cube roots of -1") {
  RootMultiset rm = majorana_roots(majorana_polynomial(ghz(3)));
  CHECK(rm.total() == 3);
  CHECK(holds(rm, ExtComplex(cplx(-1.0)), 1, 1e-9));
  CHECK(holds(rm, ExtComplex(std::polar(1.0, kPi / 3.0)), 1, 1e-9));
  CHECK(holds(rm, ExtComplex(std::polar(1.0, -kPi / 3.0)), 1, 1e-9));
}

TEST_CASE("excitation-number states pin roots at the poles") {
  RootMultiset rm = majorana_roots(majorana_polynomial(dicke(3, 1)));
  CHECK(rm.total() == 3);
  CHECK(holds(rm, ExtComplex(cplx(0.0)), 1, 1e-12));
  CHECK(holds(rm, ExtComplex::infinity(), 2, 1e-12));

  RootMultiset rm2 = majorana_roots(majorana_polynomial(dicke(8, 6)));
  CHECK(holds(rm2, ExtComplex(cplx(0.0)), 6, 1e-12));
  CHECK(holds(rm2, ExtComplex::infinity(), 2, 1e-12));
}

TEST_CASE("coherent state roots all sit opposite the stereographic node") {
  NodeState node = NodeState::from_angles(1.0, 2.5);
  RootMultiset rm = majorana_roots(majorana_polynomial(coherent_state(5, node)));
  REQUIRE(rm.roots.size() == 1);
  CHECK(rm.roots[0].multiplicity == 5);
  cplx beta = node.beta().value();
  CHECK(chordal(rm.roots[0].location, ExtComplex(-1.0 / beta)) < 1e-8);
}

TEST_CASE("multiplicity bound decides genericity by parity") {
  CHECK(genericity(ghz(3)).generic);
  CHECK(genericity(ghz(3)).gamma == 1);
  CHECK(genericity(ghz(3)).parity_rule_applied == Parity::Odd);

  GenericityReport w3 = genericity(dicke(3, 1));
  CHECK_FALSE(w3.generic);
  CHECK(w3.gamma == 2);

  CHECK_FALSE(genericity(dicke(8, 6)).generic); // gamma = 6 >= 5
  CHECK_FALSE(genericity(dicke(7, 3)).generic); // gamma = 4 >= 4
  // half filling keeps gamma below the even bound; rejection happens later,
  // at expansion time, where no diametric pair exists
  CHECK(genericity(dicke(8, 4)).generic);
  CHECK(genericity(dicke(8, 4)).parity_rule_applied == Parity::Even);
  // a lone product term is always expandable
  CHECK(genericity(coherent_state(6, NodeState::from_angles(0.7, 0.1))).generic);
  CHECK(genericity(coherent_state(6, NodeState::from_angles(0.7, 0.1))).gamma == 6);
}

TEST_CASE("product form factors the state exactly") {
  // brute force check over all 4-qubit basis strings
  std::mt19937_64 rng(57);
  SymmetricState s = random_state(4, rng);
  ProductForm pf = product_form(s);
  REQUIRE(pf.factors.size() == 4);

  // amplitude of bit string b in the permutation sum = perm-sum over factor
  // assignments; accumulate through the elementary-symmetric recursion on
  // distinct subsets instead: direct 4! enumeration
  int perm[4] = {0, 1, 2, 3};
  std::vector<cplx> sym(5, cplx(0.0));
  std::sort(perm, perm + 4);
  do {
    for (int mask = 0; mask < 16; ++mask) {
      cplx amp(1.0);
      int ones = 0;
      for (int q = 0; q < 4; ++q) {
        const SingleQubit& f = pf.factors[static_cast<size_t>(perm[q])];
        if (mask & (1 << q)) {
          amp *= f.a1;
          ++ones;
        } else {
          amp *= f.a0;
        }
      }
      sym[static_cast<size_t>(ones)] += amp;
    }
  } while (std::next_permutation(perm, perm + 4));
  DickeWeights w = dicke_weights(4);
  for (int k = 0; k <= 4; ++k) sym[static_cast<size_t>(k)] /= w.values[static_cast<size_t>(k)];

  SymmetricState sn = s.normalized();
  for (int k = 0; k <= 4; ++k)
    CHECK(std::abs(pf.A * sym[static_cast<size_t>(k)] - sn[k]) < 1e-8);
}

TEST_CASE("product form of the all-ground state") {
  SymmetricState zero(3, {cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0)});
  ProductForm pf = product_form(zero);
  CHECK(std::abs(pf.A - cplx(1.0 / 6.0)) < 1e-12);
  for (const SingleQubit& f : pf.factors) {
    CHECK(std::abs(f.a0 - cplx(1.0)) < 1e-12);
    CHECK(std::abs(f.a1) < 1e-12);
  }
}

TEST_CASE("root-side Moebius action matches the collective action") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng() % 4);
    SymmetricState s = random_state(n, rng);
    CollectiveMap g = (trial % 2) ? random_unitary(rng) : random_unit_determinant(rng);

    RootMultiset before = majorana_roots(majorana_polynomial(s));
    RootMultiset mapped = mobius_on_roots(g, before);
    RootMultiset after =
        majorana_roots(majorana_polynomial(apply_collective(g, s).state));

    REQUIRE(mapped.roots.size() == after.roots.size());
    std::vector<bool> used(after.roots.size(), false);
    for (const auto& e : mapped.roots) {
      bool hit = false;
      for (size_t j = 0; j < after.roots.size(); ++j) {
        if (used[j] || after.roots[j].multiplicity != e.multiplicity) continue;
        if (chordal(after.roots[j].location, e.location) < 1e-7) {
          used[j] = true;
          hit = true;
          break;
        }
      }
      CHECK(hit);
    }
  }
}

TEST_CASE("pole crossings through the Moebius map") {
  // alpha -> 1/alpha under the qubit flip
  CollectiveMap flip(0.0, 1.0, 1.0, 0.0, MapKind::Unitary);
  RootMultiset rm;
  rm.roots.push_back({ExtComplex(cplx(2.0)), 1});
  rm.roots.push_back({ExtComplex(cplx(0.0)), 1});
  rm.roots.push_back({ExtComplex::infinity(), 1});
  RootMultiset img = mobius_on_roots(flip, rm);
  CHECK(chordal(img.roots[0].location, ExtComplex(cplx(0.5))) < 1e-14);
  CHECK(img.roots[1].location.is_inf());
  CHECK(chordal(img.roots[2].location, ExtComplex(cplx(0.0))) < 1e-14);
}
