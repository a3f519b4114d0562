#include "symdecomp/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "symdecomp/canonical.hpp"
#include "symdecomp/errors.hpp"

namespace symdecomp {

namespace {

cplx ipow(cplx z, int n) {
  cplx r(1.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

// Cayley's hyperdeterminant of the full 2x2x2 amplitude tensor. Kept as a
// literal index-by-index evaluation so it shares no code with the solver
// paths it cross-checks.
cplx cayley_det(const SymmetricState& s) {
  DickeWeights dw = dicke_weights(3);
  cplx t[2][2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        int exc = i + j + k;
        t[i][j][k] = s[exc] / dw.values[static_cast<size_t>(exc)];
      }
  cplx d1 = t[0][0][0] * t[0][0][0] * t[1][1][1] * t[1][1][1] +
            t[0][0][1] * t[0][0][1] * t[1][1][0] * t[1][1][0] +
            t[0][1][0] * t[0][1][0] * t[1][0][1] * t[1][0][1] +
            t[1][0][0] * t[1][0][0] * t[0][1][1] * t[0][1][1];
  cplx d2 = t[0][0][0] * t[1][1][1] * t[0][1][1] * t[1][0][0] +
            t[0][0][0] * t[1][1][1] * t[1][0][1] * t[0][1][0] +
            t[0][0][0] * t[1][1][1] * t[1][1][0] * t[0][0][1] +
            t[0][1][1] * t[1][0][0] * t[1][0][1] * t[0][1][0] +
            t[0][1][1] * t[1][0][0] * t[1][1][0] * t[0][0][1] +
            t[1][0][1] * t[0][1][0] * t[1][1][0] * t[0][0][1];
  cplx d3 = t[0][0][0] * t[1][1][0] * t[1][0][1] * t[0][1][1] +
            t[1][1][1] * t[0][0][1] * t[0][1][0] * t[1][0][0];
  return d1 - 2.0 * d2 + 4.0 * d3;
}

} // namespace

InvariantSet lu_invariants(const CoherentDecomposition& d) {
  if (d.terms.empty())
    throw std::invalid_argument("lu_invariants: empty expansion");
  const size_t r = d.terms.size();
  InvariantSet inv;
  inv.A = std::abs(d.terms[0].c);
  for (size_t m = 1; m < r; ++m)
    inv.y.push_back(std::abs(d.terms[m].c) / inv.A);
  inv.gram.assign(r, std::vector<cplx>(r));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) {
      cplx phase =
          std::polar(1.0, std::arg(d.terms[j].c) - std::arg(d.terms[i].c));
      inv.gram[i][j] =
          phase * ipow(node_overlap(d.terms[i].node, d.terms[j].node),
                       d.n_qubits);
    }
  return inv;
}

double canonical_three_tangle(double y, double eps, double phi) {
  double c2 = std::cos(eps / 2.0), s2 = std::sin(eps / 2.0);
  double norm2 = 1.0 + y * y + 2.0 * y * std::cos(3.0 * phi) * s2 * s2 * s2;
  double c6 = c2 * c2 * c2;
  return 4.0 * y * y * c6 * c6 / (norm2 * norm2);
}

ThreeTangleResult three_tangle(const SymmetricState& s) {
  if (s.n_qubits() != 3)
    throw std::invalid_argument("three_tangle: state must have 3 qubits");
  SymmetricState sn = s.normalized();
  ThreeTangleResult out;
  out.oracle = 4.0 * std::abs(cayley_det(sn));

  try {
    auto [d, diag] = decompose(sn);
    (void)diag;
    if (d.terms.size() >= 2) {
      double A = std::abs(d.terms[0].c);
      double y = std::abs(d.terms[1].c) / A;
      double g = 1.0 - std::norm(node_overlap(d.terms[0].node, d.terms[1].node));
      out.from_decomposition = 4.0 * y * y * g * g * g * A * A * A * A;
    }
  } catch (const DecompositionError&) {
  }

  try {
    auto [form, map] = lu_canonical(sn);
    (void)map;
    if (!form.y.empty())
      out.from_canonical_form =
          canonical_three_tangle(form.n3_y(), form.n3_eps(), form.n3_phi());
  } catch (const DecompositionError&) {
  }

  return out;
}

SchmidtMeasure schmidt_measure(const CoherentDecomposition& d, double zero_tol) {
  int r = 0;
  for (const auto& t : d.terms)
    if (std::abs(t.c) > zero_tol) ++r;
  return {r, std::log2(static_cast<double>(r))};
}

} // namespace symdecomp
