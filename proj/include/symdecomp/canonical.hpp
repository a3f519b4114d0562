#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "symdecomp/decomp.hpp"

namespace symdecomp {

// Rotation class normal form. The leading term sits at the south pole with
// real positive weight A; remaining weights are y_m >= ..., phases l_m start
// at m = 2 (the m = 1 phase is rotated away), directions X_m likewise carry
// the residual axial rotation fixed by lexicographic minimization.
struct LUCanonicalForm {
  int n_qubits = 0;
  Parity parity = Parity::Odd;
  double A = 1.0;
  std::vector<double> y;       // m = 1..r-1
  std::vector<double> l;       // m = 2..r-1, in [0, 2pi)
  std::vector<NodeState> X;    // odd: m = 1..r-1; even: m = 2..r-1

  // Three-qubit parameter triple (y, eps, phi): y = y[0], eps/phi the polar
  // angles of X[0]. Only valid when n_qubits == 3.
  double n3_y() const;
  double n3_eps() const;
  double n3_phi() const;
};

// Invertible (determinant-one) class normal form. Odd parity:
// A(|0..0> + |1..1> + sum_m lambda_m e^{i xi_m} |Xi_m>^{tensor n}).
// Even parity: A(|0..0> + |1..1> + lambda |c>^{tensor n} + ...), where
// |c> = (|0> + c|1>)/sqrt(1+|c|^2) and (c, lambda) obey a fixed relation
// recorded by relation_residual.
struct ILCanonicalForm {
  int n_qubits = 0;
  Parity parity = Parity::Odd;
  double A = 0.0;                 // common pole weight, made real positive
  std::vector<double> lambda;     // odd: m = 2..r-1; even: m = 3..r-1
  std::vector<double> xi;         // matching phases in [0, 2pi)
  std::vector<NodeState> Xi;      // matching directions

  // even-parity leading data
  std::optional<cplx> c;
  std::optional<cplx> lam;

  // construction record for the even parametric-relation check
  struct EvenSource {
    double theta0, phi0;   // direction mapped to the |c> term
    double thetaq, phiq;   // direction mapped to |1..1>
    cplx c1_ratio;         // weight of the partner term / weight of term 0
    cplx cq_ratio;         // weight of the |1..1> source / weight of term 0
  };
  std::optional<EvenSource> even_source;
  double relation_residual = 0.0;
};

// Returns the form and the map realizing it: applying the map to s and
// re-expanding reproduces the form's parameters.
std::pair<LUCanonicalForm, CollectiveMap> lu_canonical(const SymmetricState& s);
std::pair<ILCanonicalForm, CollectiveMap> il_canonical(const SymmetricState& s);

enum class EquivalenceMode { LU, IL };

// True when both states reduce to the same normal form within tol
// (magnitudes compared relatively, angles circularly).
bool equivalent(const SymmetricState& s1, const SymmetricState& s2,
                EquivalenceMode mode, double tol = 1e-7);

// Residuals of the even-parity (c, lambda) relation for a form produced by
// il_canonical; both are ~1e-12 for a valid construction.
std::pair<double, double> even_relation_residuals(const ILCanonicalForm& form);

} // namespace symdecomp
