#include "symdecomp/symstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symdecomp {

namespace {

constexpr double kKindTol = 1e-12;
// Spinors with |v0|/|v| below this are treated as exactly south-polar.

double sq(double x) { return x * x; }

} // namespace

double wrap_angle(double a) {
  double r = std::fmod(a, kTau);
  if (r < 0.0) r += kTau;
  if (r >= kTau) r = 0.0; // fmod can land exactly on 2*pi after the shift
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / i;
  return std::round(b);
}

double gaussian(std::mt19937_64& rng) {
  // 53-bit uniforms in (0,1]; u1 > 0 keeps the log finite.
  double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
}

cplx ExtComplex::value() const {
  if (inf_) throw std::logic_error("ExtComplex: value() of infinity");
  return v_;
}

double chordal(const ExtComplex& a, const ExtComplex& b) {
  if (a.is_inf() && b.is_inf()) return 0.0;
  // The metric is invariant under z -> 1/z; switch to the inverted chart when
  // either point is outside the unit disk so nothing overflows.
  if (a.is_inf() || b.is_inf()) {
    const ExtComplex& fin = a.is_inf() ? b : a;
    if (fin.is_inf()) return 0.0;
    cplx z = fin.value();
    double m = std::abs(z);
    if (m > 1.0) return 2.0 / (m * std::sqrt(1.0 + 1.0 / (m * m)));
    return 2.0 / std::sqrt(1.0 + m * m);
  }
  cplx z = a.value(), w = b.value();
  if (std::abs(z) > 1.0 || std::abs(w) > 1.0) {
    // invert both; 1/0 -> infinity
    ExtComplex zi = (z == cplx(0.0)) ? ExtComplex::infinity() : ExtComplex(1.0 / z);
    ExtComplex wi = (w == cplx(0.0)) ? ExtComplex::infinity() : ExtComplex(1.0 / w);
    if (std::abs(z) <= 1.0 || std::abs(w) <= 1.0) {
      // mixed charts: fall through with the direct formula, both moduli <= 1e0
      // in at least one factor, no overflow for doubles until ~1e150
      return 2.0 * std::abs(z - w) /
             std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
    }
    return chordal(zi, wi);
  }
  return 2.0 * std::abs(z - w) /
         std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

ExtComplex antipode(const ExtComplex& z) {
  if (z.is_inf()) return ExtComplex(cplx(0.0));
  cplx v = z.value();
  if (v == cplx(0.0)) return ExtComplex::infinity();
  return ExtComplex(-1.0 / std::conj(v));
}

NodeState NodeState::from_angles(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi + 1e-12))
    throw std::invalid_argument("NodeState: theta outside [0, pi]");
  NodeState n;
  if (theta >= kPi - 1e-12) {
    n.theta_ = kPi;
    n.phi_ = 0.0;
    n.inf_ = true;
  } else {
    n.theta_ = theta;
    n.phi_ = (theta <= 1e-15) ? 0.0 : wrap_angle(phi);
  }
  return n;
}

NodeState NodeState::from_beta(const ExtComplex& beta) {
  if (beta.is_inf()) return from_angles(kPi, 0.0);
  cplx b = beta.value();
  double m = std::abs(b);
  return from_angles(2.0 * std::atan(m), (m == 0.0) ? 0.0 : std::arg(b));
}

NodeState NodeState::from_vector(cplx v0, cplx v1, double* phase, double* rho) {
  double r = std::sqrt(std::norm(v0) + std::norm(v1));
  if (!(r > 0.0)) throw std::invalid_argument("NodeState: zero spinor");
  NodeState n;
  double delta;
  double theta = 2.0 * std::atan2(std::abs(v1), std::abs(v0));
  // branch on the same condition from_angles snaps to the pole, so the
  // extracted phase always comes from the dominant component
  if (theta >= kPi - 1e-12) {
    n = from_angles(kPi, 0.0);
    delta = std::arg(v1);
  } else {
    delta = std::arg(v0);
    n = from_angles(theta, std::arg(v1) - delta);
  }
  if (phase) *phase = delta;
  if (rho) *rho = r;
  return n;
}

ExtComplex NodeState::beta() const {
  if (inf_) return ExtComplex::infinity();
  return ExtComplex(std::polar(std::tan(theta_ / 2.0), phi_));
}

cplx NodeState::amp0() const { return inf_ ? cplx(0.0) : cplx(std::cos(theta_ / 2.0)); }

cplx NodeState::amp1() const {
  if (inf_) return cplx(1.0);
  return std::polar(std::sin(theta_ / 2.0), phi_);
}

cplx node_overlap(const NodeState& a, const NodeState& b) {
  return std::conj(a.amp0()) * b.amp0() + std::conj(a.amp1()) * b.amp1();
}

double chordal(const NodeState& a, const NodeState& b) {
  return chordal(a.beta(), b.beta());
}

std::array<double, 3> bloch_vector(const NodeState& n) {
  return {std::sin(n.theta()) * std::cos(n.phi()),
          std::sin(n.theta()) * std::sin(n.phi()), std::cos(n.theta())};
}

CollectiveMap::CollectiveMap(cplx a, cplx b, cplx d, cplx f, MapKind kind)
    : a_(a), b_(b), d_(d), f_(f), kind_(kind) {
  double scale = std::abs(a) + std::abs(b) + std::abs(d) + std::abs(f);
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("CollectiveMap: non-finite entries");
  cplx dt = det();
  switch (kind) {
    case MapKind::Unitary: {
      // rows orthonormal
      double r0 = std::abs(std::norm(a) + std::norm(b) - 1.0);
      double r1 = std::abs(std::norm(d) + std::norm(f) - 1.0);
      double x = std::abs(a * std::conj(d) + b * std::conj(f));
      if (r0 > kKindTol || r1 > kKindTol || x > kKindTol)
        throw std::invalid_argument("CollectiveMap: matrix is not unitary");
      break;
    }
    case MapKind::UnitDeterminant:
      if (std::abs(dt - 1.0) > kKindTol)
        throw std::invalid_argument("CollectiveMap: determinant is not 1");
      break;
    case MapKind::GeneralInvertible:
      if (std::abs(dt) <= sq(scale) * 1e-14)
        throw std::invalid_argument("CollectiveMap: matrix is singular");
      break;
  }
}

CollectiveMap CollectiveMap::identity(MapKind kind) {
  return CollectiveMap(1.0, 0.0, 0.0, 1.0, kind);
}

CollectiveMap CollectiveMap::inverse() const {
  cplx dt = det();
  if (kind_ == MapKind::Unitary)
    return CollectiveMap(std::conj(a_), std::conj(d_), std::conj(b_),
                         std::conj(f_), kind_);
  return CollectiveMap(f_ / dt, -b_ / dt, -d_ / dt, a_ / dt, kind_);
}

CollectiveMap CollectiveMap::compose(const CollectiveMap& r) const {
  MapKind k = (kind_ == r.kind()) ? kind_ : MapKind::GeneralInvertible;
  return CollectiveMap(a_ * r.a() + b_ * r.d(), a_ * r.b() + b_ * r.f(),
                       d_ * r.a() + f_ * r.d(), d_ * r.b() + f_ * r.f(), k);
}

MappedNode map_node(const CollectiveMap& g, const NodeState& n) {
  cplx v0 = g.a() * n.amp0() + g.b() * n.amp1();
  cplx v1 = g.d() * n.amp0() + g.f() * n.amp1();
  MappedNode out;
  out.node = NodeState::from_vector(v0, v1, &out.delta, &out.rho);
  return out;
}

DickeWeights dicke_weights(int n) {
  if (n < 1) throw std::invalid_argument("dicke_weights: n_qubits < 1");
  DickeWeights w;
  w.n_qubits = n;
  w.values.resize(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    w.values[static_cast<size_t>(k)] = std::sqrt(binomial(n, k));
  return w;
}

SymmetricState::SymmetricState(int n_qubits, std::vector<cplx> dicke)
    : n_(n_qubits), c_(std::move(dicke)) {
  if (n_ < 1) throw std::invalid_argument("SymmetricState: n_qubits < 1");
  if (c_.size() != static_cast<size_t>(n_) + 1)
    throw std::invalid_argument("SymmetricState: need n_qubits + 1 amplitudes");
  double t = 0.0;
  for (const cplx& z : c_) t += std::norm(z);
  if (!std::isfinite(t) || !(t > 0.0))
    throw std::invalid_argument("SymmetricState: amplitudes not finite and nonzero");
}

double SymmetricState::norm() const {
  double t = 0.0;
  for (const cplx& z : c_) t += std::norm(z);
  return std::sqrt(t);
}

SymmetricState SymmetricState::normalized() const {
  std::vector<cplx> v = c_;
  double nrm = norm();
  double peak = 0.0;
  for (const cplx& z : v) peak = std::max(peak, std::abs(z));
  cplx rot(1.0);
  for (const cplx& z : v) {
    if (std::abs(z) > 1e-12 * peak) {
      rot = std::polar(1.0, -std::arg(z));
      break;
    }
  }
  for (cplx& z : v) z = z * rot / nrm;
  return SymmetricState(n_, std::move(v));
}

SymmetricState coherent_state(int n, const NodeState& node) {
  DickeWeights w = dicke_weights(n);
  std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0));
  if (node.at_infinity()) {
    c.back() = 1.0;
    return SymmetricState(n, std::move(c));
  }
  double ct = std::cos(node.theta() / 2.0);
  double st = std::sin(node.theta() / 2.0);
  for (int k = 0; k <= n; ++k) {
    c[static_cast<size_t>(k)] = w.values[static_cast<size_t>(k)] *
                                std::pow(ct, n - k) *
                                std::polar(std::pow(st, k), node.phi() * k);
  }
  return SymmetricState(n, std::move(c));
}

cplx overlap(const SymmetricState& s1, const SymmetricState& s2) {
  if (s1.n_qubits() != s2.n_qubits())
    throw std::invalid_argument("overlap: qubit counts differ");
  cplx t(0.0);
  for (int k = 0; k <= s1.n_qubits(); ++k) t += std::conj(s1[k]) * s2[k];
  return t;
}

namespace {

// Characteristic-function coefficients lambda_k = sqrt(binom(n,k)) c_k make the
// per-qubit action polynomial. Upper-triangular [[p,q],[0,r]] substitutes
// (q + r*alpha) for the excited slot and scales by p per ground slot.
std::vector<cplx> shear_upper(const std::vector<cplx>& lam, int n, cplx p, cplx q,
                              cplx r) {
  std::vector<cplx> out(lam.size(), cplx(0.0));
  for (int k = 0; k <= n; ++k) {
    cplx acc(0.0);
    for (int j = k; j <= n; ++j) {
      acc += lam[static_cast<size_t>(j)] * binomial(j, k) *
             std::pow(q, j - k) * std::pow(p, n - j);
    }
    out[static_cast<size_t>(k)] = acc * std::pow(r, k);
  }
  return out;
}

// Lower unitriangular [[1,0],[w,1]] substitutes (1 + w*alpha) per ground slot.
std::vector<cplx> shear_lower(const std::vector<cplx>& lam, int n, cplx w) {
  std::vector<cplx> out(lam.size(), cplx(0.0));
  for (int k = 0; k <= n; ++k) {
    cplx acc(0.0);
    for (int j = 0; j <= k; ++j) {
      acc += lam[static_cast<size_t>(j)] * binomial(n - j, k - j) *
             std::pow(w, k - j);
    }
    out[static_cast<size_t>(k)] = acc;
  }
  return out;
}

} // namespace

CollectiveImage apply_collective(const CollectiveMap& g, const SymmetricState& s,
                                 bool renormalize) {
  int n = s.n_qubits();
  DickeWeights w = dicke_weights(n);
  std::vector<cplx> lam(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    lam[static_cast<size_t>(k)] = s[k] * w.values[static_cast<size_t>(k)];

  cplx a = g.a(), b = g.b(), d = g.d(), f = g.f();
  bool swapped = std::abs(b) > std::abs(a);
  if (swapped) {
    // g = (g*S)*S with S the qubit flip; S reverses the coefficient list.
    std::reverse(lam.begin(), lam.end());
    std::swap(a, b);
    std::swap(d, f);
  }
  // column pivot done; factor [[a,b],[d,f]] = [[1,0],[d/a,1]] * [[a,b],[0,det/a]]
  cplx dt = a * f - b * d;
  lam = shear_upper(lam, n, a, b, dt / a);
  if (d != cplx(0.0)) lam = shear_lower(lam, n, d / a);

  std::vector<cplx> c(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    c[static_cast<size_t>(k)] = lam[static_cast<size_t>(k)] / w.values[static_cast<size_t>(k)];
  SymmetricState raw(n, std::move(c));
  double scale = raw.norm();
  if (!renormalize) return {raw, scale};
  std::vector<cplx> cn = raw.dicke();
  for (cplx& z : cn) z /= scale;
  return {SymmetricState(n, std::move(cn)), scale};
}

SymmetricState random_state(int n, std::mt19937_64& rng) {
  std::vector<cplx> c(static_cast<size_t>(n) + 1);
  for (cplx& z : c) z = cplx(gaussian(rng), gaussian(rng));
  return SymmetricState(n, std::move(c)).normalized();
}

CollectiveMap random_unitary(std::mt19937_64& rng) {
  // QR of a 2x2 complex Gaussian via explicit Gram-Schmidt.
  while (true) {
    cplx x0(gaussian(rng), gaussian(rng)), x1(gaussian(rng), gaussian(rng));
    cplx y0(gaussian(rng), gaussian(rng)), y1(gaussian(rng), gaussian(rng));
    double nx = std::sqrt(std::norm(x0) + std::norm(x1));
    if (nx < 1e-6) continue;
    x0 /= nx;
    x1 /= nx;
    cplx ip = std::conj(x0) * y0 + std::conj(x1) * y1;
    y0 -= ip * x0;
    y1 -= ip * x1;
    double ny = std::sqrt(std::norm(y0) + std::norm(y1));
    if (ny < 1e-6) continue;
    return CollectiveMap(x0, x1, y0 / ny, y1 / ny, MapKind::Unitary);
  }
}

CollectiveMap random_unit_determinant(std::mt19937_64& rng, double entry_bound) {
  while (true) {
    cplx m[4];
    for (cplx& z : m) z = cplx(gaussian(rng), gaussian(rng));
    cplx dt = m[0] * m[3] - m[1] * m[2];
    if (std::abs(dt) < 0.05) continue;
    cplx r = std::sqrt(dt);
    bool ok = true;
    for (cplx& z : m) {
      z /= r;
      ok = ok && std::abs(z) <= entry_bound;
    }
    if (!ok) continue;
    // polish the determinant to 1 exactly within roundoff
    cplx d2 = m[0] * m[3] - m[1] * m[2];
    cplx r2 = std::sqrt(d2);
    return CollectiveMap(m[0] / r2, m[1] / r2, m[2] / r2, m[3] / r2,
                         MapKind::UnitDeterminant);
  }
}

} // namespace symdecomp
