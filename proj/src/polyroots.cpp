#include "symdecomp/polyroots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symdecomp {

void horner2(const std::vector<cplx>& a, cplx z, cplx* p, cplx* dp) {
  cplx v(0.0), d(0.0);
  for (size_t i = a.size(); i-- > 0;) {
    d = d * z + v;
    v = v * z + a[i];
  }
  if (p) *p = v;
  if (dp) *dp = d;
}

double max_relative_residual(const std::vector<cplx>& a,
                             const std::vector<cplx>& roots) {
  double worst = 0.0;
  for (cplx z : roots) {
    cplx p;
    horner2(a, z, &p, nullptr);
    double scale = 0.0, zp = 1.0, az = std::abs(z);
    for (const cplx& ak : a) {
      scale += std::abs(ak) * zp;
      zp *= az;
    }
    if (scale == 0.0) scale = 1.0;
    worst = std::max(worst, std::abs(p) / scale);
  }
  return worst;
}

namespace {

std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
  // numerically stable form: the small root comes from c / q
  cplx disc = std::sqrt(b * b - 4.0 * a * c);
  cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc)
                                                   : -0.5 * (b - disc);
  std::vector<cplx> r;
  r.push_back(q / a);
  if (std::abs(q) > 0.0)
    r.push_back(c / q);
  else
    r.push_back(cplx(0.0)); // b == 0 and c == 0
  return r;
}

std::vector<cplx> aberth(const std::vector<cplx>& a, int max_iter) {
  const size_t deg = a.size() - 1;
  // start on a slightly perturbed circle sized by the coefficient ratio
  double r0 = std::pow(std::abs(a.front() / a.back()), 1.0 / static_cast<double>(deg));
  if (!std::isfinite(r0) || r0 <= 0.0) r0 = 1.0;
  r0 = std::clamp(r0, 1e-3, 1e3);
  std::vector<cplx> z(deg);
  for (size_t i = 0; i < deg; ++i) {
    double ang = kTau * static_cast<double>(i) / static_cast<double>(deg) + 0.41;
    z[i] = std::polar(r0 * (1.0 + 0.05 * static_cast<double>(i % 3)), ang);
  }
  for (int it = 0; it < max_iter; ++it) {
    double worst = 0.0;
    for (size_t i = 0; i < deg; ++i) {
      cplx p, dp;
      horner2(a, z[i], &p, &dp);
      if (std::abs(p) == 0.0) continue;
      cplx ratio = (dp == cplx(0.0)) ? cplx(1e3) : p / dp;
      cplx sum(0.0);
      for (size_t j = 0; j < deg; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      cplx denom = 1.0 - ratio * sum;
      cplx w = (std::abs(denom) < 1e-300) ? ratio : ratio / denom;
      z[i] -= w;
      worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[i])));
    }
    if (worst < 1e-15) break;
  }
  return z;
}

std::vector<cplx> companion_eigen(const std::vector<cplx>& a) {
  const auto deg = static_cast<Eigen::Index>(a.size() - 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) m(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i)
    m(i, deg - 1) = -a[static_cast<size_t>(i)] / a.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<cplx> z(static_cast<size_t>(deg));
  for (Eigen::Index i = 0; i < deg; ++i) z[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return z;
}

// one Newton step per root against the full polynomial tightens clusters
void polish(const std::vector<cplx>& a, std::vector<cplx>& z) {
  for (cplx& zi : z) {
    for (int it = 0; it < 3; ++it) {
      cplx p, dp;
      horner2(a, zi, &p, &dp);
      if (std::abs(dp) < 1e-300) break;
      cplx w = p / dp;
      if (!(std::abs(w) < 1.0 + std::abs(zi))) break; // diverging, keep as is
      zi -= w;
      if (std::abs(w) < 1e-15 * (1.0 + std::abs(zi))) break;
    }
  }
}

} // namespace

std::vector<cplx> find_polynomial_roots(const std::vector<cplx>& coeffs) {
  if (coeffs.size() < 2) return {};
  double peak = 0.0;
  for (const cplx& c : coeffs) peak = std::max(peak, std::abs(c));
  if (!(peak > 0.0)) throw std::invalid_argument("find_polynomial_roots: zero polynomial");
  if (std::abs(coeffs.back()) < 1e-300 * peak)
    throw std::invalid_argument("find_polynomial_roots: vanishing leading coefficient");

  std::vector<cplx> a = coeffs;
  for (cplx& c : a) c /= peak;

  if (a.size() == 2) return {-a[0] / a[1]};
  if (a.size() == 3) return quadratic_roots(a[2], a[1], a[0]);

  std::vector<cplx> z = aberth(a, 200);
  polish(a, z);
  if (max_relative_residual(a, z) > 1e-9) {
    std::vector<cplx> alt = companion_eigen(a);
    polish(a, alt);
    if (max_relative_residual(a, alt) < max_relative_residual(a, z)) z = alt;
  }
  return z;
}

} // namespace symdecomp
