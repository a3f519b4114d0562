#pragma once

#include <vector>

#include "symdecomp/symstate.hpp"

namespace symdecomp {

// Stellar polynomial of the state: coeffs[k] = sqrt(binom(n,k)) * c_k, so a
// product state along beta has coefficients proportional to (1 + alpha*beta)^n.
struct MajoranaPoly {
  int n_qubits;
  std::vector<cplx> coeffs;
};

MajoranaPoly majorana_polynomial(const SymmetricState& s);

// Root constellation on the sphere; degree deficits count as roots at
// infinity so multiplicities always sum to n_qubits.
struct RootMultiset {
  struct Entry {
    ExtComplex location;
    int multiplicity;
  };
  std::vector<Entry> roots;

  int total() const;
};

// Numerical roots clustered at chordal tolerance tol.
RootMultiset majorana_roots(const MajoranaPoly& p, double tol = 1e-6);

enum class Parity { Even, Odd };

inline Parity parity_of(int n_qubits) {
  return (n_qubits % 2 == 0) ? Parity::Even : Parity::Odd;
}

struct GenericityReport {
  int gamma;    // largest multiplicity in the constellation
  bool generic; // multiplicity bound for the state's parity holds
  Parity parity_rule_applied;
};

// A state admits the coherent expansion iff gamma stays below (n+1)/2 for odd
// n, below n/2 + 1 for even n, or the state is a single product term
// (gamma == n).
GenericityReport genericity(const SymmetricState& s, double tol = 1e-6);

// One qubit of the fully factored (product) form.
struct SingleQubit {
  cplx a0, a1;
};

// Factorization over the root constellation: s is proportional to the
// symmetrized product of the returned qubit states, with amplitude A on the
// normalized symmetrization. Roots at infinity become |0> factors.
struct ProductForm {
  cplx A;
  std::vector<SingleQubit> factors;
};

ProductForm product_form(const SymmetricState& s);

// Image of a constellation under the root-side Moebius action of g:
// alpha -> (a*alpha - b) / (f - d*alpha), computed homogeneously.
RootMultiset mobius_on_roots(const CollectiveMap& g, const RootMultiset& r);

} // namespace symdecomp
