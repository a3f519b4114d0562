#pragma once

#include <vector>

#include "symdecomp/symstate.hpp"

namespace symdecomp {

// All roots of sum_k coeffs[k] z^k. The leading coefficient must be nonzero
// relative to the largest one; callers strip degenerate leading/trailing
// coefficients themselves (see majorana_roots). Aberth-Ehrlich iteration with
// a companion-matrix eigenvalue fallback when residuals stay high.
std::vector<cplx> find_polynomial_roots(const std::vector<cplx>& coeffs);

// Horner evaluation of p and p' at z.
void horner2(const std::vector<cplx>& coeffs, cplx z, cplx* p, cplx* dp);

// max_i |p(z_i)| / sum_k |a_k| |z_i|^k, a scale-aware residual in [0, ~1].
double max_relative_residual(const std::vector<cplx>& coeffs,
                             const std::vector<cplx>& roots);

} // namespace symdecomp
