#include "symdecomp/majorana.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "symdecomp/polyroots.hpp"

namespace symdecomp {

namespace {

// Coefficients smaller than this (relative to the peak) at the ends of the
// list are treated as exact zeros: the matching roots sit at 0 or infinity
// beyond any sensible clustering radius anyway.
constexpr double kTrimTol = 1e-13;

// Relative size below which a derivative value counts as an exact zero when
// confirming a multiple root. An m-fold root scatters the raw root finder by
// roughly eps^(1/m), far beyond any fixed clustering radius, so multiplicity
// is decided by testing derivatives instead of by point distances.
constexpr double kMultTol = 1e-7;

// Coefficient-level backward error a claimed multiple root may absorb. A
// cluster is eligible as one m-fold root only when its diameter stays within
// (kMultBackward)^(1/m), the scatter such a root picks up from perturbations
// of that size; wider clumps are distinct roots sitting close together, and
// in the middle of such a clump the polynomial and its first few derivatives
// are all small, so the derivative test alone cannot tell the two apart.
constexpr double kMultBackward = 2.2e-10;

// Mean direction of a set of sphere points, as an ExtComplex.
ExtComplex sphere_mean(const std::vector<ExtComplex>& pts) {
  double x = 0, y = 0, z = 0;
  for (const ExtComplex& e : pts) {
    NodeState n = NodeState::from_beta(e);
    auto v = bloch_vector(n);
    x += v[0];
    y += v[1];
    z += v[2];
  }
  double r = std::sqrt(x * x + y * y + z * z);
  if (r < 1e-12) return pts.front(); // pathological spread; keep one member
  double theta = std::acos(std::clamp(z / r, -1.0, 1.0));
  double phi = std::atan2(y, x);
  return NodeState::from_angles(theta, phi).beta();
}

std::vector<cplx> derivative(const std::vector<cplx>& a) {
  std::vector<cplx> d;
  for (size_t k = 1; k < a.size(); ++k) d.push_back(a[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(cplx(0.0));
  return d;
}

// Horner value together with the magnitude scale sum |a_k| |z|^k.
std::pair<cplx, double> eval_scaled(const std::vector<cplx>& a, cplx z) {
  cplx v(0.0);
  double s = 0.0, az = std::abs(z);
  for (size_t k = a.size(); k-- > 0;) {
    v = v * z + a[k];
    s = s * az + std::abs(a[k]);
  }
  return {v, s};
}

// Check whether the polynomial has an m-fold root near z0. Newton-polishes z0
// against the (m-1)th derivative (where a true m-fold root is simple) and then
// requires every lower derivative to vanish within kMultTol of its own scale.
// Large points are handled in the inverted chart w = 1/z, where the reversed
// coefficient list describes the same root structure.
struct MultTest {
  bool ok = false;
  ExtComplex where = ExtComplex(cplx(0.0));
};
MultTest confirm_multiplicity(const std::vector<cplx>& full, ExtComplex z0, int m) {
  MultTest res;
  bool invert = z0.is_inf() || std::abs(z0.value()) > 1.0;
  std::vector<cplx> poly = full;
  if (invert) std::reverse(poly.begin(), poly.end());
  cplx w = z0.is_inf() ? cplx(0.0) : (invert ? 1.0 / z0.value() : z0.value());

  std::vector<std::vector<cplx>> dv(static_cast<size_t>(m) + 1);
  dv[0] = poly;
  for (int j = 1; j <= m; ++j) dv[static_cast<size_t>(j)] = derivative(dv[static_cast<size_t>(j) - 1]);

  cplx start = w;
  for (int it = 0; it < 40; ++it) {
    auto [num, ns] = eval_scaled(dv[static_cast<size_t>(m) - 1], w);
    auto [den, ds] = eval_scaled(dv[static_cast<size_t>(m)], w);
    (void)ns;
    (void)ds;
    if (std::abs(den) < 1e-300) break;
    cplx step = num / den;
    w -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(w))) break;
  }
  ExtComplex back = invert ? (std::abs(w) < 1e-12 ? ExtComplex::infinity() : ExtComplex(1.0 / w))
                           : ExtComplex(w);
  // refuse a polish that ran away from the cluster it is meant to explain
  if (chordal(back, z0) > 0.3 || std::abs(w - start) > 0.5 * (1.0 + std::abs(start))) return res;

  for (int j = 0; j < m; ++j) {
    auto [v, s] = eval_scaled(dv[static_cast<size_t>(j)], w);
    if (!(s > 0.0)) return res;
    if (std::abs(v) > kMultTol * s) return res;
  }
  res.ok = true;
  res.where = back;
  return res;
}

// minimal spanning tree split: remove the longest edge, return the component
// containing index 0 in `left`, the rest in `right`
void mst_split(const std::vector<ExtComplex>& pts, const std::vector<size_t>& idx,
               std::vector<size_t>& left, std::vector<size_t>& right) {
  size_t m = idx.size();
  std::vector<bool> used(m, false);
  std::vector<double> dist(m, 1e300);
  std::vector<size_t> parent(m, 0);
  std::vector<std::pair<size_t, size_t>> edges;
  used[0] = true;
  for (size_t i = 1; i < m; ++i) dist[i] = chordal(pts[idx[0]], pts[idx[i]]);
  for (size_t step = 1; step < m; ++step) {
    size_t best = m;
    for (size_t i = 0; i < m; ++i)
      if (!used[i] && (best == m || dist[i] < dist[best])) best = i;
    used[best] = true;
    edges.emplace_back(parent[best], best);
    for (size_t i = 0; i < m; ++i)
      if (!used[i]) {
        double d = chordal(pts[idx[best]], pts[idx[i]]);
        if (d < dist[i]) {
          dist[i] = d;
          parent[i] = best;
        }
      }
  }
  size_t cut = 0;
  double longest = -1.0;
  for (size_t e = 0; e < edges.size(); ++e) {
    double d = chordal(pts[idx[edges[e].first]], pts[idx[edges[e].second]]);
    if (d > longest) {
      longest = d;
      cut = e;
    }
  }
  // rebuild connectivity without the cut edge
  std::vector<std::vector<size_t>> adj(m);
  for (size_t e = 0; e < edges.size(); ++e) {
    if (e == cut) continue;
    adj[edges[e].first].push_back(edges[e].second);
    adj[edges[e].second].push_back(edges[e].first);
  }
  std::vector<bool> mark(m, false);
  std::vector<size_t> stack{edges[cut].first};
  mark[edges[cut].first] = true;
  while (!stack.empty()) {
    size_t v = stack.back();
    stack.pop_back();
    for (size_t u : adj[v])
      if (!mark[u]) {
        mark[u] = true;
        stack.push_back(u);
      }
  }
  for (size_t i = 0; i < m; ++i) (mark[i] ? left : right).push_back(idx[i]);
}

double max_pairwise(const std::vector<ExtComplex>& pts, const std::vector<size_t>& idx) {
  double d = 0.0;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j)
      d = std::max(d, chordal(pts[idx[i]], pts[idx[j]]));
  return d;
}

// Recursive clustering: accept the whole set as one multiple root when the
// derivative test (or plain coincidence within tol) confirms it, otherwise
// split at the widest gap and retry the parts.
void verify_or_split(const std::vector<cplx>& full, const std::vector<ExtComplex>& pts,
                     const std::vector<size_t>& idx, double tol, RootMultiset& out) {
  int m = static_cast<int>(idx.size());
  if (m == 1) {
    out.roots.push_back({pts[idx[0]], 1});
    return;
  }
  std::vector<ExtComplex> members;
  for (size_t i : idx) members.push_back(pts[i]);
  ExtComplex mean = sphere_mean(members);
  double diam = max_pairwise(pts, idx);
  if (diam <= std::pow(kMultBackward, 1.0 / static_cast<double>(m))) {
    MultTest t = confirm_multiplicity(full, mean, m);
    if (t.ok) {
      out.roots.push_back({t.where, m});
      return;
    }
  }
  if (diam <= tol) { // coincident beyond numerical doubt
    out.roots.push_back({mean, m});
    return;
  }
  std::vector<size_t> left, right;
  mst_split(pts, idx, left, right);
  if (left.empty() || right.empty()) { // degenerate; refuse to loop forever
    out.roots.push_back({mean, m});
    return;
  }
  verify_or_split(full, pts, left, tol, out);
  verify_or_split(full, pts, right, tol, out);
}

} // namespace

MajoranaPoly majorana_polynomial(const SymmetricState& s) {
  DickeWeights w = dicke_weights(s.n_qubits());
  MajoranaPoly p;
  p.n_qubits = s.n_qubits();
  p.coeffs.resize(w.values.size());
  for (size_t k = 0; k < w.values.size(); ++k) p.coeffs[k] = s.dicke()[k] * w.values[k];
  return p;
}

int RootMultiset::total() const {
  int t = 0;
  for (const Entry& e : roots) t += e.multiplicity;
  return t;
}

RootMultiset majorana_roots(const MajoranaPoly& p, double tol) {
  const int n = p.n_qubits;
  if (p.coeffs.size() != static_cast<size_t>(n) + 1)
    throw std::invalid_argument("majorana_roots: coefficient count mismatch");
  double peak = 0.0;
  for (const cplx& c : p.coeffs) peak = std::max(peak, std::abs(c));
  if (!(peak > 0.0)) throw std::invalid_argument("majorana_roots: zero polynomial");

  int lo = 0, hi = n; // first and last retained coefficient indices
  while (hi > 0 && std::abs(p.coeffs[static_cast<size_t>(hi)]) <= kTrimTol * peak) --hi;
  while (lo < hi && std::abs(p.coeffs[static_cast<size_t>(lo)]) <= kTrimTol * peak) ++lo;

  int inf_count = n - hi; // degree deficit
  int zero_count = lo;

  std::vector<cplx> finite;
  if (hi > lo) {
    std::vector<cplx> mid(p.coeffs.begin() + lo, p.coeffs.begin() + hi + 1);
    finite = find_polynomial_roots(mid);
  }

  // roots beyond the clustering horizon belong with infinity
  std::vector<ExtComplex> pts;
  for (cplx z : finite) {
    if (std::abs(z) > 2.0 / tol)
      ++inf_count;
    else
      pts.emplace_back(z);
  }
  for (int i = 0; i < zero_count; ++i) pts.emplace_back(cplx(0.0));

  RootMultiset out;
  if (!pts.empty()) {
    std::vector<size_t> all(pts.size());
    std::iota(all.begin(), all.end(), size_t{0});
    verify_or_split(p.coeffs, pts, all, tol, out);
  }
  // a split can carve one scattered multiple root in two; re-merge coincidences
  for (size_t i = 0; i < out.roots.size(); ++i)
    for (size_t j = out.roots.size(); j-- > i + 1;)
      if (chordal(out.roots[i].location, out.roots[j].location) <= tol) {
        out.roots[i].multiplicity += out.roots[j].multiplicity;
        out.roots.erase(out.roots.begin() + static_cast<long>(j));
      }
  if (inf_count > 0) out.roots.push_back({ExtComplex::infinity(), inf_count});

  // deterministic order: infinity last, others by (|beta| asc, arg asc)
  std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) {
    if (a.location.is_inf() != b.location.is_inf()) return b.location.is_inf();
    if (a.location.is_inf()) return false;
    double ma = std::abs(a.location.value()), mb = std::abs(b.location.value());
    if (ma != mb) return ma < mb;
    return std::arg(a.location.value()) < std::arg(b.location.value());
  });
  return out;
}

GenericityReport genericity(const SymmetricState& s, double tol) {
  SymmetricState sn = s.normalized();
  RootMultiset r = majorana_roots(majorana_polynomial(sn), tol);
  int gamma = 0;
  for (const auto& e : r.roots) gamma = std::max(gamma, e.multiplicity);
  const int n = sn.n_qubits();
  GenericityReport rep;
  rep.gamma = gamma;
  rep.parity_rule_applied = parity_of(n);
  int bound = (rep.parity_rule_applied == Parity::Odd) ? (n + 1) / 2 : n / 2 + 1;
  rep.generic = (gamma < bound) || (gamma == n);
  return rep;
}

ProductForm product_form(const SymmetricState& s) {
  SymmetricState sn = s.normalized();
  const int n = sn.n_qubits();
  RootMultiset rm = majorana_roots(majorana_polynomial(sn), 1e-9);

  ProductForm pf;
  for (const auto& e : rm.roots) {
    for (int i = 0; i < e.multiplicity; ++i) {
      // root alpha contributes the factor (amp0 + alpha * amp1) with the
      // qubit state (sin, -e^{-i phi} cos) built from alpha's polar angles
      if (e.location.is_inf()) {
        pf.factors.push_back({cplx(1.0), cplx(0.0)}); // factor independent of alpha
      } else {
        NodeState a = NodeState::from_beta(e.location);
        double st = std::sin(a.theta() / 2.0), ct = std::cos(a.theta() / 2.0);
        pf.factors.push_back({cplx(st), -std::polar(ct, -a.phi())});
      }
    }
  }

  // A = <product|s> / <product|product> over the symmetrized product
  // (the factors are each unit norm but not mutually orthogonal)
  std::vector<cplx> prod(static_cast<size_t>(n) + 1, cplx(0.0));
  prod[0] = 1.0;
  int used = 0;
  for (const SingleQubit& q : pf.factors) {
    // multiply the symmetric tensor by one more factor, tracked in the
    // unnormalized occupation basis, then convert at the end
    std::vector<cplx> next(static_cast<size_t>(n) + 1, cplx(0.0));
    for (int k = 0; k <= used; ++k) {
      next[static_cast<size_t>(k)] += prod[static_cast<size_t>(k)] * q.a0;
      next[static_cast<size_t>(k) + 1] += prod[static_cast<size_t>(k)] * q.a1;
    }
    prod = std::move(next);
    ++used;
  }
  // prod now holds sum over bitstrings grouped by weight divided evenly:
  // coefficient of the symmetric basis ket k is prod[k] / sqrt(binom(n,k))
  DickeWeights w = dicke_weights(n);
  std::vector<cplx> sym(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    sym[static_cast<size_t>(k)] = prod[static_cast<size_t>(k)] / w.values[static_cast<size_t>(k)];
  SymmetricState ps(n, sym);
  double pn = ps.norm();
  // s = A * sum over all n! qubit orderings of the factor product; the
  // projected state ps equals that sum divided by n!, so divide once more.
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  pf.A = overlap(ps, sn) / (pn * pn * fact);
  return pf;
}

RootMultiset mobius_on_roots(const CollectiveMap& g, const RootMultiset& r) {
  RootMultiset out;
  out.roots.reserve(r.roots.size());
  for (const auto& e : r.roots) {
    // homogeneous coordinates alpha = p/q; image [a p - b q : f q - d p]
    cplx p, q;
    if (e.location.is_inf()) {
      p = 1.0;
      q = 0.0;
    } else {
      p = e.location.value();
      q = 1.0;
      double m = std::max(std::abs(p), 1.0);
      p /= m;
      q /= m;
    }
    cplx pp = g.a() * p - g.b() * q;
    cplx qq = g.f() * q - g.d() * p;
    ExtComplex img = (std::abs(qq) <= 1e-14 * (std::abs(pp) + std::abs(qq)))
                         ? ExtComplex::infinity()
                         : ExtComplex(pp / qq);
    out.roots.push_back({img, e.multiplicity});
  }
  return out;
}

} // namespace symdecomp
