#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "symdecomp/majorana.hpp"
#include "symdecomp/symstate.hpp"

namespace symdecomp {

struct DecompositionTerm {
  cplx c;         // weight of the normalized coherent term
  NodeState node; // direction of the term
};

// Finite superposition of spin coherent states equal to the (normalized)
// input state. Terms are ordered by descending |c|; for even qubit counts the
// first two terms point in diametrically opposite directions.
struct CoherentDecomposition {
  int n_qubits = 0;
  Parity parity = Parity::Odd;
  std::vector<DecompositionTerm> terms;

  cplx A() const;                // c_0
  std::vector<double> y() const; // |c_m| / |c_0|, m = 0..r-1 (y_0 = 1)
  std::vector<double> k() const; // arg(c_m / c_0) in [0, 2pi), k_0 = 0
};

struct DecompositionDiagnostics {
  double reconstruction_fidelity_deficit = 0.0;
  double max_determinant_residual = 0.0;
  double max_root_residual = 0.0;
  double value_at_zero_residual = 0.0;
  std::vector<std::string> notes;
};

struct MomentVector {
  std::vector<cplx> mu; // c_k / sqrt(binom(n,k)), k = 0..n
};
MomentVector moments(const SymmetricState& s);

struct DecomposeOptions {
  double tol = 1e-9;        // accepted reconstruction fidelity deficit
  double cluster_tol = 1e-6;
  double tie_tol = 1e-9;    // relative |c| gap treated as a tie
  int max_attempts = 5;     // random frame retries
  std::uint64_t seed = 0x5eedULL;
};

// Minimal-length coherent expansion of s (at most (n+1)/2 terms for odd n,
// n/2 + 1 for even n). Throws DecompositionError on non-generic states and
// solver failures.
std::pair<CoherentDecomposition, DecompositionDiagnostics>
decompose(const SymmetricState& s, double tol);
std::pair<CoherentDecomposition, DecompositionDiagnostics>
decompose(const SymmetricState& s, const DecomposeOptions& opts = {});

struct Reconstruction {
  SymmetricState state;
  double raw_norm; // norm of the coefficient sum before renormalization
};
Reconstruction reconstruct(const CoherentDecomposition& d);

// Residuals of the defining interpolation conditions of d against s: the
// expansion must annihilate the stellar roots of s (with derivative
// conditions on repeated roots), keep every root-selection determinant near
// zero, and match the polynomial value at alpha = 0.
DecompositionDiagnostics verify_expansion_conditions(const CoherentDecomposition& d,
                                                 const SymmetricState& s);

// Every admissible even-parity solution (the antipodal-pair condition has
// finitely many), ordered by descending |c_0|. Used by the invertible-class
// normal form to enumerate candidates; odd parity returns the single solution.
std::vector<CoherentDecomposition> all_decompositions(const SymmetricState& s,
                                                      const DecomposeOptions& opts = {});

} // namespace symdecomp
