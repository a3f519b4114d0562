#include "symdecomp/decomp.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symdecomp/errors.hpp"
#include "symdecomp/polyroots.hpp"

namespace symdecomp {

namespace {

constexpr double kRankTol = 1e-9;   // relative singular value cutoff
constexpr double kInfGuard = 1e7;   // nodes this far out mean a bad frame
constexpr double kZeroWeight = 1e-12;

// Internal signal: the random frame put a node too close to infinity (or the
// node polynomial degenerated); rotate differently and try again.
struct BadFrame {};

struct FrameSolution {
  std::vector<cplx> w;     // interpolation weights
  std::vector<cplx> beta;  // finite node coordinates in the current frame
  double residual = 0.0;   // relative moment-matching residual
  bool paired = false;     // beta[1] is the antipode of beta[0]
};

double weight_scale(const std::vector<cplx>& mu) {
  double s = 0.0;
  for (const cplx& m : mu) s = std::max(s, std::abs(m));
  return s > 0.0 ? s : 1.0;
}

Eigen::MatrixXcd hankel(const std::vector<cplx>& mu, int rows, int cols) {
  Eigen::MatrixXcd h(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) h(i, j) = mu[static_cast<size_t>(i + j)];
  return h;
}

// Least-squares weights for fixed nodes over the full moment window.
std::vector<cplx> vandermonde_weights(const std::vector<cplx>& mu,
                                      const std::vector<cplx>& beta) {
  const int rows = static_cast<int>(mu.size());
  const int r = static_cast<int>(beta.size());
  Eigen::MatrixXcd V(rows, r);
  Eigen::VectorXcd rhs(rows);
  for (int k = 0; k < rows; ++k) {
    rhs(k) = mu[static_cast<size_t>(k)];
    for (int m = 0; m < r; ++m)
      V(k, m) = (k == 0) ? cplx(1.0) : V(k - 1, m) * beta[static_cast<size_t>(m)];
  }
  Eigen::VectorXcd w = V.colPivHouseholderQr().solve(rhs);
  std::vector<cplx> out(static_cast<size_t>(r));
  for (int m = 0; m < r; ++m) out[static_cast<size_t>(m)] = w(m);
  return out;
}

double moment_residual(const std::vector<cplx>& mu, const std::vector<cplx>& w,
                       const std::vector<cplx>& beta) {
  double worst = 0.0;
  for (size_t k = 0; k < mu.size(); ++k) {
    cplx acc(0.0);
    for (size_t m = 0; m < w.size(); ++m)
      acc += w[m] * std::pow(beta[m], static_cast<double>(k));
    worst = std::max(worst, std::abs(acc - mu[k]));
  }
  return worst / weight_scale(mu);
}

// Damped Gauss-Newton refinement of (w, beta) against every moment, with the
// optional rigid coupling beta[1] = -1/conj(beta[0]). Nonholomorphic pieces
// enter through that coupling only, handled by splitting the Jacobian into
// dz and dz-bar parts per unknown.
bool polish_terms(std::vector<cplx>& w, std::vector<cplx>& beta,
                  const std::vector<cplx>& mu, bool paired, double* out_residual) {
  const int r = static_cast<int>(w.size());
  const int rows_c = static_cast<int>(mu.size());
  const int free_nodes = paired ? r - 1 : r;
  const int unknowns = 2 * (r + free_nodes);
  const double scale = weight_scale(mu);

  auto pack_residual = [&](Eigen::VectorXd& F) {
    if (paired) beta[1] = -1.0 / std::conj(beta[0]);
    F.resize(2 * rows_c);
    for (int k = 0; k < rows_c; ++k) {
      cplx acc(0.0);
      for (int m = 0; m < r; ++m)
        acc += w[static_cast<size_t>(m)] *
               std::pow(beta[static_cast<size_t>(m)], static_cast<double>(k));
      cplx f = acc - mu[static_cast<size_t>(k)];
      F(2 * k) = f.real();
      F(2 * k + 1) = f.imag();
    }
  };

  Eigen::VectorXd F;
  pack_residual(F);
  double fn = F.norm();

  for (int iter = 0; iter < 60; ++iter) {
    if (F.lpNorm<Eigen::Infinity>() <= 1e-15 * scale) break;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * rows_c, unknowns);
    for (int k = 0; k < rows_c; ++k) {
      auto put_block = [&](int col2, cplx h, cplx g) {
        J(2 * k, col2) = (h + g).real();
        J(2 * k, col2 + 1) = -std::imag(h - g);
        J(2 * k + 1, col2) = (h + g).imag();
        J(2 * k + 1, col2 + 1) = std::real(h - g);
      };
      double kk = static_cast<double>(k);
      for (int m = 0; m < r; ++m) {
        cplx bm = beta[static_cast<size_t>(m)];
        put_block(2 * m, std::pow(bm, kk), cplx(0.0)); // d/dw_m
      }
      int col = 2 * r;
      for (int m = 0; m < r; ++m) {
        if (paired && m == 1) continue;
        cplx bm = beta[static_cast<size_t>(m)];
        cplx h = (k == 0) ? cplx(0.0)
                          : w[static_cast<size_t>(m)] * kk * std::pow(bm, kk - 1.0);
        cplx g(0.0);
        if (paired && m == 0 && k > 0) {
          cplx b1 = beta[1];
          // beta1 depends antiholomorphically on beta0: d beta1 / d conj(beta0) = beta1^2
          g = w[1] * kk * std::pow(b1, kk - 1.0) * b1 * b1;
        }
        put_block(col, h, g);
        col += 2;
      }
    }
    Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
    if (!step.allFinite()) return false;

    std::vector<cplx> w0 = w, b0 = beta;
    double damp = 1.0;
    bool improved = false;
    for (int half = 0; half < 8; ++half) {
      for (int m = 0; m < r; ++m)
        w[static_cast<size_t>(m)] =
            w0[static_cast<size_t>(m)] +
            damp * cplx(step(2 * m), step(2 * m + 1));
      int col = 2 * r;
      for (int m = 0; m < r; ++m) {
        if (paired && m == 1) continue;
        beta[static_cast<size_t>(m)] =
            b0[static_cast<size_t>(m)] + damp * cplx(step(col), step(col + 1));
        col += 2;
      }
      Eigen::VectorXd Ftry;
      pack_residual(Ftry);
      if (Ftry.norm() < fn) {
        F = Ftry;
        fn = F.norm();
        improved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!improved) {
      w = w0;
      beta = b0;
      if (paired) beta[1] = -1.0 / std::conj(beta[0]);
      break;
    }
  }
  double res = moment_residual(mu, w, beta);
  if (out_residual) *out_residual = res;
  return res <= 1e-10;
}

// ---- odd parity / unconstrained minimal expansion ----

std::vector<cplx> null_vector(const Eigen::MatrixXcd& h) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeFullV);
  Eigen::VectorXcd v = svd.matrixV().col(h.cols() - 1);
  std::vector<cplx> out(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<size_t>(i)] = v(i);
  return out;
}

int hankel_rank(const Eigen::MatrixXcd& h) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * s(0)) ++r;
  return r;
}

std::vector<cplx> poly_roots_checked(const std::vector<cplx>& q) {
  double peak = 0.0;
  for (const cplx& c : q) peak = std::max(peak, std::abs(c));
  if (!(peak > 0.0)) throw BadFrame{};
  if (std::abs(q.back()) <= 1e-10 * peak) throw BadFrame{}; // node at infinity
  std::vector<cplx> roots = find_polynomial_roots(q);
  for (cplx z : roots)
    if (!(std::abs(z) < kInfGuard)) throw BadFrame{};
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      if (chordal(ExtComplex(roots[i]), ExtComplex(roots[j])) < 1e-9) throw BadFrame{};
  return roots;
}

FrameSolution solve_minimal(const std::vector<cplx>& mu, int n) {
  const int upper = (n + 1) / 2 + (n % 2 == 0 ? 1 : 0); // max admissible terms
  Eigen::MatrixXcd probe = hankel(mu, (n + 2) / 2, n + 1 - (n + 2) / 2 + 1);
  int r = hankel_rank(probe);
  if (r < 1) throw BadFrame{};
  r = std::min(r, upper);
  std::vector<cplx> q = null_vector(hankel(mu, n + 1 - r, r + 1));
  FrameSolution sol;
  sol.beta = poly_roots_checked(q);
  sol.w = vandermonde_weights(mu, sol.beta);
  polish_terms(sol.w, sol.beta, mu, false, &sol.residual);
  return sol;
}

// ---- even parity: two-dimensional null family and the antipodal-pair cut ----

cplx poly_eval(const std::vector<cplx>& a, cplx z) {
  cplx v(0.0);
  for (size_t i = a.size(); i-- > 0;) v = v * z + a[i];
  return v;
}

cplx poly_eval_deriv(const std::vector<cplx>& a, cplx z) {
  cplx v(0.0);
  for (size_t i = a.size(); i-- > 1;)
    v = v * z + a[i] * static_cast<double>(i);
  return v;
}

// z^D * conj(p(-1/conj(z))) for formal degree D = a.size()-1; its roots are
// the antipodes of p's roots (trailing zeros for roots pushed to infinity).
std::vector<cplx> antipodal_transform(const std::vector<cplx>& a) {
  std::vector<cplx> out(a.size());
  const size_t d = a.size() - 1;
  for (size_t j = 0; j < a.size(); ++j) {
    cplx v = std::conj(a[j]);
    if (j % 2) v = -v;
    out[d - j] = v;
  }
  return out;
}

struct EvenFamily {
  std::vector<cplx> v1, v2;   // null-space basis, formal degree n/2 + 1
  std::vector<cplx> t1, t2;   // antipodal transforms
};

cplx family_F(const EvenFamily& fam, cplx z, cplx* dz = nullptr, cplx* dzb = nullptr) {
  cplx a = poly_eval(fam.t1, z), b = poly_eval(fam.v2, z);
  cplx c = poly_eval(fam.t2, z), d = poly_eval(fam.v1, z);
  if (dz) *dz = poly_eval_deriv(fam.t1, z) * std::conj(b) -
                poly_eval_deriv(fam.t2, z) * std::conj(d);
  if (dzb) *dzb = a * std::conj(poly_eval_deriv(fam.v2, z)) -
                  c * std::conj(poly_eval_deriv(fam.v1, z));
  return a * std::conj(b) - c * std::conj(d);
}

double family_F_scale(const EvenFamily& fam, cplx z) {
  return std::abs(poly_eval(fam.t1, z)) * std::abs(poly_eval(fam.v2, z)) +
         std::abs(poly_eval(fam.t2, z)) * std::abs(poly_eval(fam.v1, z)) + 1e-300;
}

// 2D Newton on F from one start; returns true on convergence.
bool newton_pair_condition(const EvenFamily& fam, cplx& z) {
  for (int it = 0; it < 80; ++it) {
    cplx dz, dzb;
    cplx f = family_F(fam, z, &dz, &dzb);
    double fs = family_F_scale(fam, z);
    if (std::abs(f) <= 1e-11 * fs) return true;
    // real 2x2 system from the Wirtinger split
    double a11 = (dz + dzb).real(), a12 = -std::imag(dz - dzb);
    double a21 = (dz + dzb).imag(), a22 = std::real(dz - dzb);
    double det = a11 * a22 - a12 * a21;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
    double sx = (-f.real() * a22 + f.imag() * a12) / det;
    double sy = (-f.imag() * a11 + f.real() * a21) / det;
    cplx step(sx, sy);
    double damp = 1.0;
    bool moved = false;
    for (int half = 0; half < 6; ++half) {
      cplx zt = z + damp * step;
      if (std::abs(zt) < 1e8 &&
          std::abs(family_F(fam, zt)) < std::abs(f)) {
        z = zt;
        moved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!moved) return std::abs(f) <= 1e-8 * fs;
  }
  cplx f = family_F(fam, z);
  return std::abs(f) <= 1e-9 * family_F_scale(fam, z);
}

std::vector<cplx> dedupe_points(const std::vector<cplx>& pts, double tol) {
  std::vector<cplx> out;
  for (cplx p : pts) {
    bool dup = false;
    for (cplx q : out)
      if (chordal(ExtComplex(p), ExtComplex(q)) < tol) dup = true;
    if (!dup) out.push_back(p);
  }
  return out;
}

// F(z) = 0 is the reality slice w = conj(z) of the polynomial system
//   P(z,w) = s1(w) v2(z) - s2(w) v1(z),   s_i(w) = w^D v_i(-1/w),
//   Q(z,w) = t1(z) vb2(w) - t2(z) vb1(w), vb_i = conjugated coefficients,
// where Q is the coefficient-conjugate of P with the variables swapped.
// Both P and Q vanish identically on w = -1/z (a member through beta always
// pairs beta with itself through the antipode map), so the factor (1 + z w)
// must be divided out first; the resultant of the raw pair is identically
// zero. With P = (1+zw) Pt, the w-coefficients of Pt follow the exact
// recursion g_j = p_j - z g_{j-1}. Eliminating w from (Pt, Qt) with a
// Sylvester resultant leaves a univariate polynomial (degree <= 2 (D-1)^2)
// whose roots contain every pair location, so the search is exhaustive
// instead of hoping a Newton seed lands in each basin. The resultant is
// sampled on the unit circle and its coefficients recovered by an inverse
// DFT; |z| <= 1 suffices because every pair has a member in the unit disk.
std::vector<cplx> resultant_pair_roots(const EvenFamily& fam) {
  const size_t D = fam.v1.size() - 1;
  if (D < 2) return {};
  const size_t S = 2 * (D - 1);
  const size_t M = 2 * (D - 1) * (D - 1) + 2;

  std::vector<cplx> s1(fam.t1.size()), s2(fam.t2.size());
  for (size_t i = 0; i < s1.size(); ++i) s1[i] = std::conj(fam.t1[i]);
  for (size_t i = 0; i < s2.size(); ++i) s2[i] = std::conj(fam.t2[i]);

  std::vector<cplx> vals(M), g(D), h(D);
  double peak = 0.0;
  Eigen::MatrixXcd syl(S, S);
  for (size_t k = 0; k < M; ++k) {
    cplx z = std::polar(1.0, kTau * static_cast<double>(k) / static_cast<double>(M));
    cplx a1 = poly_eval(fam.v1, z), a2 = poly_eval(fam.v2, z);
    cplx b1 = poly_eval(fam.t1, z), b2 = poly_eval(fam.t2, z);
    for (size_t j = 0; j < D; ++j) {
      cplx pj = s1[j] * a2 - s2[j] * a1;
      cplx qj = std::conj(fam.v2[j]) * b1 - std::conj(fam.v1[j]) * b2;
      g[j] = j == 0 ? pj : pj - z * g[j - 1];
      h[j] = j == 0 ? qj : qj - z * h[j - 1];
    }
    syl.setZero();
    for (size_t r = 0; r + 1 < D; ++r)
      for (size_t j = 0; j < D; ++j) {
        syl(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r + j)) =
            g[D - 1 - j];
        syl(static_cast<Eigen::Index>(D - 1 + r),
            static_cast<Eigen::Index>(r + j)) = h[D - 1 - j];
      }
    vals[k] = syl.partialPivLu().determinant();
    peak = std::max(peak, std::abs(vals[k]));
  }
  if (!(peak > 1e-200)) return {}; // degenerate family: Pt and Qt share a factor

  std::vector<cplx> coeffs(M);
  double cmax = 0.0;
  for (size_t m = 0; m < M; ++m) {
    cplx acc(0.0);
    for (size_t k = 0; k < M; ++k)
      acc += vals[k] * std::polar(1.0, -kTau * static_cast<double>(k * m) /
                                            static_cast<double>(M));
    coeffs[m] = acc / static_cast<double>(M);
    cmax = std::max(cmax, std::abs(coeffs[m]));
  }
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-13 * cmax)
    coeffs.pop_back();
  if (coeffs.size() < 2) return {};

  std::vector<cplx> out;
  for (cplx z : find_polynomial_roots(coeffs))
    if (std::abs(z) < kInfGuard) out.push_back(z);
  return out;
}

// Assemble, polish and validate a paired candidate from a node set where
// nodes[pair_i] and nodes[pair_j] are (approximately) antipodal.
bool build_paired_candidate(const std::vector<cplx>& mu, std::vector<cplx> beta,
                            size_t pair_i, size_t pair_j, FrameSolution& out) {
  // order: pair first
  std::vector<cplx> arranged;
  arranged.push_back(beta[pair_i]);
  arranged.push_back(beta[pair_j]);
  for (size_t m = 0; m < beta.size(); ++m)
    if (m != pair_i && m != pair_j) arranged.push_back(beta[m]);
  arranged[1] = -1.0 / std::conj(arranged[0]);

  FrameSolution sol;
  sol.paired = true;
  sol.beta = arranged;
  sol.w = vandermonde_weights(mu, sol.beta);
  if (!polish_terms(sol.w, sol.beta, mu, true, &sol.residual)) return false;
  // vanishing weights mean the pair was spurious (a zero-weight node is not
  // part of the expansion)
  const int n = static_cast<int>(mu.size()) - 1;
  std::vector<double> cm(sol.w.size());
  double cmax = 0.0;
  for (size_t m = 0; m < sol.w.size(); ++m) {
    cm[m] = std::abs(sol.w[m]) *
            std::pow(1.0 + std::norm(sol.beta[m]), 0.5 * n);
    cmax = std::max(cmax, cm[m]);
  }
  for (double v : cm)
    if (v < kZeroWeight * cmax) return false;
  for (size_t i = 0; i < sol.beta.size(); ++i)
    for (size_t j = i + 1; j < sol.beta.size(); ++j)
      if (chordal(ExtComplex(sol.beta[i]), ExtComplex(sol.beta[j])) < 1e-8)
        return false;
  out = sol;
  return true;
}

bool same_node_multiset(const std::vector<cplx>& a, const std::vector<cplx>& b,
                        double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (cplx x : a) {
    bool hit = false;
    for (size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && chordal(ExtComplex(x), ExtComplex(b[j])) < tol) {
        used[j] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

// Same expansion and the same choice of leading pair (two solutions with the
// same nodes but different pairs are distinct under the ordering convention).
bool same_solution(const FrameSolution& a, const FrameSolution& b, double tol) {
  if (!same_node_multiset(a.beta, b.beta, tol)) return false;
  if (!a.paired || !b.paired) return true;
  bool direct = chordal(ExtComplex(a.beta[0]), ExtComplex(b.beta[0])) < tol &&
                chordal(ExtComplex(a.beta[1]), ExtComplex(b.beta[1])) < tol;
  bool flipped = chordal(ExtComplex(a.beta[0]), ExtComplex(b.beta[1])) < tol &&
                 chordal(ExtComplex(a.beta[1]), ExtComplex(b.beta[0])) < tol;
  return direct || flipped;
}

std::vector<FrameSolution> solve_even_all(const std::vector<cplx>& mu, int n,
                                          std::mt19937_64& rng) {
  const int K = n / 2 + 1;
  Eigen::MatrixXcd H = hankel(mu, n / 2, n / 2 + 2);
  int rank = hankel_rank(H);
  if (rank < 1) throw BadFrame{};

  std::vector<FrameSolution> out;

  if (rank < n / 2) {
    // the minimal expansion is shorter than the family length and unique
    FrameSolution sol = solve_minimal(mu, n);
    if (sol.beta.size() == 1) return {sol}; // single product term, no pair needed
    // otherwise admissible only when it already contains an antipodal pair
    for (size_t i = 0; i < sol.beta.size(); ++i)
      for (size_t j = i + 1; j < sol.beta.size(); ++j) {
        if (chordal(ExtComplex(sol.beta[j]),
                    antipode(ExtComplex(sol.beta[i]))) > 1e-5)
          continue;
        FrameSolution cand;
        if (!build_paired_candidate(mu, sol.beta, i, j, cand)) continue;
        bool dup = false;
        for (const FrameSolution& s : out)
          if (same_solution(s, cand, 1e-6)) dup = true;
        if (!dup) out.push_back(cand);
      }
    return out;
  }

  // full family: two null directions
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeFullV);
  EvenFamily fam;
  fam.v1.resize(static_cast<size_t>(n) / 2 + 2);
  fam.v2.resize(static_cast<size_t>(n) / 2 + 2);
  for (int i = 0; i < n / 2 + 2; ++i) {
    fam.v1[static_cast<size_t>(i)] = svd.matrixV()(i, n / 2);
    fam.v2[static_cast<size_t>(i)] = svd.matrixV()(i, n / 2 + 1);
  }
  fam.t1 = antipodal_transform(fam.v1);
  fam.t2 = antipodal_transform(fam.v2);

  // common roots of the family pin nodes shared by every member
  std::vector<cplx> common;
  {
    double p1 = 0.0, p2 = 0.0;
    for (const cplx& c : fam.v1) p1 = std::max(p1, std::abs(c));
    for (const cplx& c : fam.v2) p2 = std::max(p2, std::abs(c));
    std::vector<cplx> v1t = fam.v1;
    while (v1t.size() > 1 && std::abs(v1t.back()) < 1e-10 * p1) v1t.pop_back();
    if (v1t.size() > 1) {
      for (cplx z : find_polynomial_roots(v1t)) {
        if (!(std::abs(z) < kInfGuard)) continue;
        double s2 = 0.0, zp = 1.0;
        for (const cplx& c : fam.v2) {
          s2 += std::abs(c) * zp;
          zp *= std::abs(z);
        }
        if (std::abs(poly_eval(fam.v2, z)) < 1e-8 * std::max(s2, p2))
          common.push_back(z);
      }
    }
  }

  // candidate pair locations: Newton on the pair condition from a global
  // start grid, plus antipodes of pinned nodes
  std::vector<cplx> seeds;
  const int grid = 48;
  for (int i = 0; i < grid; ++i) {
    double ct = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / grid;
    double theta = std::acos(ct);
    double phi = 2.39996322972865332 * static_cast<double>(i);
    if (theta > 2.9) continue;
    seeds.push_back(std::polar(std::tan(theta / 2.0), phi));
  }
  auto unif = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 12; ++i) {
    double theta = std::acos(1.0 - 2.0 * unif());
    if (theta > 2.9) theta = 2.9;
    seeds.push_back(std::polar(std::tan(theta / 2.0), kTau * unif()));
  }

  std::vector<cplx> pair_locs;
  // exhaustive candidates from the elimination polynomial, then the seed
  // grid as insurance for the degenerate-family fallback
  for (cplx z0 : resultant_pair_roots(fam)) {
    cplx z = z0;
    if (newton_pair_condition(fam, z)) pair_locs.push_back(z);
  }
  for (cplx z0 : seeds) {
    cplx z = z0;
    if (newton_pair_condition(fam, z)) pair_locs.push_back(z);
  }
  pair_locs = dedupe_points(pair_locs, 1e-6);

  // the condition can have twin zeros a hair apart (two admissible
  // expansions whose pairs nearly coincide); rings of extra starts around
  // every hit separate them
  std::vector<cplx> refined = pair_locs;
  for (cplx z0 : pair_locs)
    for (double rad : {1e-3, 1e-4})
      for (int a = 0; a < 8; ++a) {
        cplx z = z0 + std::polar(rad, kTau * (static_cast<double>(a) + 0.5) / 8.0);
        if (newton_pair_condition(fam, z)) refined.push_back(z);
      }
  pair_locs = dedupe_points(refined, 1e-6);

  auto try_family_member = [&](cplx t, int chart) {
    // chart 0: q = v1 + t v2; chart 1: q = v2 + t v1
    std::vector<cplx> q(fam.v1.size());
    for (size_t i = 0; i < q.size(); ++i)
      q[i] = chart == 0 ? fam.v1[i] + t * fam.v2[i] : fam.v2[i] + t * fam.v1[i];
    double peak = 0.0;
    for (const cplx& c : q) peak = std::max(peak, std::abs(c));
    if (!(peak > 0.0)) return;
    while (q.size() > 1 && std::abs(q.back()) < 1e-10 * peak) q.pop_back();
    if (static_cast<int>(q.size()) - 1 != K) return; // node at infinity: skip frame-local candidate
    std::vector<cplx> nodes;
    try {
      nodes = poly_roots_checked(q);
    } catch (const BadFrame&) {
      return;
    }
    // locate antipodal pairs within the member
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t j = i + 1; j < nodes.size(); ++j) {
        if (chordal(ExtComplex(nodes[j]), antipode(ExtComplex(nodes[i]))) > 1e-4)
          continue;
        FrameSolution cand;
        if (!build_paired_candidate(mu, nodes, i, j, cand)) continue;
        bool dup = false;
        for (const FrameSolution& s : out)
          if (same_solution(s, cand, 1e-6)) dup = true;
        if (!dup) out.push_back(cand);
      }
  };

  for (cplx z : pair_locs) {
    cplx a = poly_eval(fam.v1, z), b = poly_eval(fam.v2, z);
    if (std::abs(b) >= std::abs(a)) {
      if (std::abs(b) < 1e-13) continue; // both vanish: pinned node, handled below
      try_family_member(-a / b, 0);
    } else {
      try_family_member(-b / a, 1);
    }
  }
  for (cplx c : common) {
    cplx anti = -1.0 / std::conj(c);
    cplx a = poly_eval(fam.v1, anti), b = poly_eval(fam.v2, anti);
    if (std::abs(b) >= std::abs(a) && std::abs(b) > 1e-13)
      try_family_member(-a / b, 0);
    else if (std::abs(a) > 1e-13)
      try_family_member(-b / a, 1);
  }
  // fully pinned pair: every family member contains it; weights of the free
  // node vanish, so the expansion is the pinned set alone
  if (common.size() >= 2) {
    for (size_t i = 0; i < common.size(); ++i)
      for (size_t j = i + 1; j < common.size(); ++j) {
        if (chordal(ExtComplex(common[j]), antipode(ExtComplex(common[i]))) > 1e-4)
          continue;
        FrameSolution cand;
        if (!build_paired_candidate(mu, common, i, j, cand)) continue;
        bool dup = false;
        for (const FrameSolution& s : out)
          if (same_solution(s, cand, 1e-6)) dup = true;
        if (!dup) out.push_back(cand);
      }
  }
  return out;
}

} // namespace

// ---- public surface ----

MomentVector moments(const SymmetricState& s) {
  DickeWeights w = dicke_weights(s.n_qubits());
  MomentVector mv;
  mv.mu.resize(w.values.size());
  for (size_t k = 0; k < w.values.size(); ++k) mv.mu[k] = s.dicke()[k] / w.values[k];
  return mv;
}

cplx CoherentDecomposition::A() const {
  return terms.empty() ? cplx(0.0) : terms.front().c;
}

std::vector<double> CoherentDecomposition::y() const {
  std::vector<double> out;
  if (terms.empty()) return out;
  double a = std::abs(terms.front().c);
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(std::abs(t.c) / a);
  return out;
}

std::vector<double> CoherentDecomposition::k() const {
  std::vector<double> out;
  if (terms.empty()) return out;
  double base = std::arg(terms.front().c);
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(wrap_angle(std::arg(t.c) - base));
  return out;
}

Reconstruction reconstruct(const CoherentDecomposition& d) {
  if (d.terms.empty()) throw std::invalid_argument("reconstruct: empty expansion");
  const int n = d.n_qubits;
  std::vector<cplx> acc(static_cast<size_t>(n) + 1, cplx(0.0));
  for (const auto& t : d.terms) {
    SymmetricState cs = coherent_state(n, t.node);
    for (int k = 0; k <= n; ++k) acc[static_cast<size_t>(k)] += t.c * cs[k];
  }
  SymmetricState raw(n, std::move(acc));
  double nrm = raw.norm();
  std::vector<cplx> cn = raw.dicke();
  for (cplx& z : cn) z /= nrm;
  return {SymmetricState(n, std::move(cn)), nrm};
}

namespace {

// evaluation pieces shared by verify_expansion_conditions
struct TermView {
  bool infinite;
  cplx w;    // finite: weight of the (1, beta) tensor; infinite: plain weight
  cplx beta; // finite only
};

std::vector<TermView> term_views(const CoherentDecomposition& d) {
  std::vector<TermView> out;
  out.reserve(d.terms.size());
  for (const auto& t : d.terms) {
    TermView v;
    v.infinite = t.node.at_infinity();
    if (v.infinite) {
      v.w = t.c;
      v.beta = cplx(0.0);
    } else {
      cplx b = t.node.beta().value();
      v.w = t.c / std::pow(1.0 + std::norm(b), 0.5 * d.n_qubits);
      v.beta = b;
    }
    out.push_back(v);
  }
  return out;
}

} // namespace

DecompositionDiagnostics verify_expansion_conditions(const CoherentDecomposition& d,
                                                 const SymmetricState& s) {
  if (d.terms.empty()) throw std::invalid_argument("verify: empty expansion");
  SymmetricState sn = s.normalized();
  const int n = sn.n_qubits();
  if (n != d.n_qubits) throw std::invalid_argument("verify: qubit count mismatch");

  DecompositionDiagnostics diag;

  Reconstruction rec = reconstruct(d);
  diag.reconstruction_fidelity_deficit =
      1.0 - std::abs(overlap(rec.state, sn));

  MajoranaPoly poly = majorana_polynomial(sn);
  RootMultiset roots = majorana_roots(poly, 1e-6);
  std::vector<TermView> tv = term_views(d);

  // interpolation conditions at every root, with derivative rows on repeats
  for (const auto& e : roots.roots) {
    for (int j = 0; j < e.multiplicity; ++j) {
      cplx acc(0.0);
      double scale = 1e-300;
      for (const TermView& t : tv) {
        cplx term;
        if (e.location.is_inf()) {
          term = t.infinite ? (j == 0 ? t.w : cplx(0.0))
                            : t.w * std::pow(t.beta, static_cast<double>(n - j));
        } else {
          cplx a = e.location.value();
          term = t.infinite
                     ? t.w * std::pow(a, static_cast<double>(n - j))
                     : t.w * std::pow(t.beta, static_cast<double>(j)) *
                           std::pow(1.0 + a * t.beta, static_cast<double>(n - j));
        }
        acc += term;
        scale += std::abs(term);
      }
      diag.max_root_residual =
          std::max(diag.max_root_residual, std::abs(acc) / scale);
    }
  }

  // selection determinants over distinct root locations
  const size_t r = d.terms.size();
  if (roots.roots.size() >= r) {
    std::vector<bool> mask(roots.roots.size(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(r), true);
    // iterate subsets via std::prev_permutation on the mask
    do {
      Eigen::MatrixXcd M(r, r);
      size_t row = 0;
      for (size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const auto& e = roots.roots[i];
        for (size_t m = 0; m < r; ++m) {
          const TermView& t = tv[m];
          cplx entry;
          if (e.location.is_inf())
            entry = t.infinite ? cplx(1.0) : std::pow(t.beta, static_cast<double>(n));
          else {
            cplx a = e.location.value();
            entry = t.infinite ? std::pow(a, static_cast<double>(n))
                               : std::pow(1.0 + a * t.beta, static_cast<double>(n));
          }
          M(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(m)) = entry;
        }
        ++row;
      }
      double bound = 1e-300;
      double prod = 1.0;
      for (size_t i = 0; i < r; ++i) prod *= M.row(static_cast<Eigen::Index>(i)).norm();
      bound += prod;
      diag.max_determinant_residual = std::max(
          diag.max_determinant_residual, std::abs(M.determinant()) / bound);
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }

  // value at the origin must reproduce the lowest coefficient
  cplx p0(0.0);
  for (const TermView& t : tv)
    if (!t.infinite) p0 += t.w;
  diag.value_at_zero_residual =
      std::abs(p0 - poly.coeffs.front()) / (1.0 + std::abs(poly.coeffs.front()));
  return diag;
}

namespace {

int compare_angles(const NodeState& a, const NodeState& b) {
  if (std::abs(a.theta() - b.theta()) > 1e-12)
    return a.theta() < b.theta() ? -1 : 1;
  if (std::abs(a.phi() - b.phi()) > 1e-12) return a.phi() < b.phi() ? -1 : 1;
  return 0;
}

// descending |c| with angle keys inside tie groups; duplicate terms are a
// pathology the ordering convention cannot absorb
void order_terms(std::vector<DecompositionTerm>& terms, size_t fixed_prefix,
                 double tie_tol) {
  double cmax = 0.0;
  for (const auto& t : terms) cmax = std::max(cmax, std::abs(t.c));
  auto lt = [&](const DecompositionTerm& a, const DecompositionTerm& b) {
    double da = std::abs(a.c), db = std::abs(b.c);
    if (std::abs(da - db) > tie_tol * cmax) return da > db;
    return compare_angles(a.node, b.node) < 0;
  };
  std::sort(terms.begin() + static_cast<long>(fixed_prefix), terms.end(), lt);
  for (size_t i = 0; i + 1 < terms.size(); ++i) {
    if (std::abs(std::abs(terms[i].c) - std::abs(terms[i + 1].c)) <=
            tie_tol * cmax &&
        chordal(terms[i].node, terms[i + 1].node) < 1e-9)
      throw DecompositionError(Fault::TieBreakUnstable,
                               "two expansion terms coincide; ordering undefined");
  }
}

CoherentDecomposition assemble(const FrameSolution& sol, const CollectiveMap& frame,
                               int n, double tie_tol) {
  CoherentDecomposition d;
  d.n_qubits = n;
  d.parity = parity_of(n);
  CollectiveMap back = frame.inverse();
  for (size_t m = 0; m < sol.w.size(); ++m) {
    DecompositionTerm t;
    cplx b = sol.beta[m];
    cplx c = sol.w[m] * std::pow(1.0 + std::norm(b), 0.5 * n);
    NodeState node = NodeState::from_beta(ExtComplex(b));
    MappedNode mapped = map_node(back, node);
    t.node = mapped.node;
    t.c = c * std::polar(std::pow(mapped.rho, n), mapped.delta * n);
    d.terms.push_back(t);
  }
  if (sol.paired && d.terms.size() >= 2) {
    // keep the pair in front, larger weight first
    double cmax = 0.0;
    for (const auto& t : d.terms) cmax = std::max(cmax, std::abs(t.c));
    double gap = std::abs(d.terms[0].c) - std::abs(d.terms[1].c);
    if (gap < -tie_tol * cmax ||
        (std::abs(gap) <= tie_tol * cmax &&
         compare_angles(d.terms[0].node, d.terms[1].node) > 0))
      std::swap(d.terms[0], d.terms[1]);
    order_terms(d.terms, 2, tie_tol);
  } else {
    order_terms(d.terms, 0, tie_tol);
  }
  return d;
}

struct EngineResult {
  std::vector<CoherentDecomposition> all;
  DecompositionDiagnostics lead_diag;
};

EngineResult run_engine(const SymmetricState& input, const DecomposeOptions& opts) {
  SymmetricState sn = input.normalized();
  const int n = sn.n_qubits();
  GenericityReport rep = genericity(sn, opts.cluster_tol);
  if (!rep.generic)
    throw DecompositionError(
        Fault::NonGeneric,
        "largest stellar multiplicity " + std::to_string(rep.gamma) +
            " violates the expansion bound for " + std::to_string(n) + " qubits");

  EngineResult result;

  if (rep.gamma == n) {
    // single product term; the n-fold root alpha corresponds to beta = -1/alpha
    RootMultiset rm = majorana_roots(majorana_polynomial(sn), opts.cluster_tol);
    ExtComplex alpha = rm.roots.front().location;
    ExtComplex beta;
    if (alpha.is_inf())
      beta = ExtComplex(cplx(0.0));
    else if (alpha.value() == cplx(0.0))
      beta = ExtComplex::infinity();
    else
      beta = ExtComplex(-1.0 / alpha.value());
    CoherentDecomposition d;
    d.n_qubits = n;
    d.parity = parity_of(n);
    DecompositionTerm t;
    t.node = NodeState::from_beta(beta);
    t.c = overlap(coherent_state(n, t.node), sn);
    d.terms.push_back(t);
    result.all.push_back(d);
    result.lead_diag = verify_expansion_conditions(d, sn);
    return result;
  }

  std::mt19937_64 rng(opts.seed);
  bool any_clean_empty = false;
  double best_deficit = 1e300;
  std::string last_note;

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    CollectiveMap frame = random_unitary(rng);
    SymmetricState sr = apply_collective(frame, sn).state;
    std::vector<cplx> mu = moments(sr).mu;
    try {
      std::vector<FrameSolution> sols;
      if (parity_of(n) == Parity::Odd)
        sols.push_back(solve_minimal(mu, n));
      else
        sols = solve_even_all(mu, n, rng);

      if (sols.empty()) {
        any_clean_empty = true;
        continue; // confirm across frames before rejecting
      }

      std::vector<CoherentDecomposition> cands;
      for (const FrameSolution& fs : sols)
        cands.push_back(assemble(fs, frame, n, opts.tie_tol));
      std::sort(cands.begin(), cands.end(),
                [](const CoherentDecomposition& a, const CoherentDecomposition& b) {
                  return std::abs(a.A()) > std::abs(b.A());
                });

      // distinct expansions whose leading weights tie admit no canonical
      // choice; this only happens on exactly symmetric inputs
      if (cands.size() >= 2 &&
          std::abs(std::abs(cands[0].A()) - std::abs(cands[1].A())) <=
              1e-8 * std::abs(cands[0].A()))
        throw DecompositionError(Fault::NonGeneric,
                                 "expansion is not unique: distinct admissible "
                                 "solutions share the maximal leading weight");

      DecompositionDiagnostics diag = verify_expansion_conditions(cands[0], sn);
      if (cands.size() >= 2)
        diag.notes.push_back("alternate admissible solutions: " +
                             std::to_string(cands.size() - 1));
      if (diag.reconstruction_fidelity_deficit <= opts.tol) {
        result.all = std::move(cands);
        result.lead_diag = diag;
        return result;
      }
      best_deficit = std::min(best_deficit, diag.reconstruction_fidelity_deficit);
      last_note = "fidelity deficit " + std::to_string(diag.reconstruction_fidelity_deficit);
    } catch (const BadFrame&) {
      continue;
    }
  }

  if (any_clean_empty)
    throw DecompositionError(Fault::NonGeneric,
                             "no expansion with a diametric pair exists for this state");
  throw DecompositionError(Fault::SolverFailure,
                           "no frame produced the expansion to tolerance; " +
                               (last_note.empty() ? std::string("all frames degenerate")
                                                  : last_note));
}

} // namespace

std::pair<CoherentDecomposition, DecompositionDiagnostics>
decompose(const SymmetricState& s, double tol) {
  DecomposeOptions opts;
  opts.tol = tol;
  return decompose(s, opts);
}

std::pair<CoherentDecomposition, DecompositionDiagnostics>
decompose(const SymmetricState& s, const DecomposeOptions& opts) {
  EngineResult r = run_engine(s, opts);
  return {r.all.front(), r.lead_diag};
}

std::vector<CoherentDecomposition> all_decompositions(const SymmetricState& s,
                                                      const DecomposeOptions& opts) {
  return run_engine(s, opts).all;
}

} // namespace symdecomp
