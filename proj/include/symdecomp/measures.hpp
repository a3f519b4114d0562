#pragma once

#include <optional>
#include <vector>

#include "symdecomp/decomp.hpp"

namespace symdecomp {

// Rotation-class invariants of an expansion: the Gram matrix
// g[n][m] = e^{i(k_m - k_n)} <node_n|node_m>^N together with the weight
// ratios y and the leading weight magnitude A.
struct InvariantSet {
  std::vector<std::vector<cplx>> gram;
  std::vector<double> y;
  double A;
};

InvariantSet lu_invariants(const CoherentDecomposition& d);

// Residual three-qubit entanglement computed three ways: from the expansion
// geometry, from the rotation normal form, and from the degree-4 invariant of
// the coefficient tensor (the oracle). The first two are unavailable for
// product states.
struct ThreeTangleResult {
  std::optional<double> from_decomposition;
  std::optional<double> from_canonical_form;
  double oracle;
};

ThreeTangleResult three_tangle(const SymmetricState& s);

// Closed-form tangle on the three-qubit normal-form parameters.
double canonical_three_tangle(double y, double eps, double phi);

struct SchmidtMeasure {
  int r;    // number of terms with |c_m| above zero_tol
  double P; // log2(r)
};

SchmidtMeasure schmidt_measure(const CoherentDecomposition& d,
                               double zero_tol = 1e-10);

} // namespace symdecomp
