#include "symdecomp/canonical.hpp"

#include "symdecomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace symdecomp {

namespace {

// Equality band for ranking candidate forms. Keys that agree across discrete
// branch choices do so up to solver noise (~1e-9); keys that differ do so by
// a macroscopic amount (root-of-unity steps), so the band between the two
// scales keeps the ranking stable under small perturbations of the input.
constexpr double kKeyBand = 1e-7;

// Phases sit in [0, 2pi); fold values just below the wrap point to negative
// so that noise around zero cannot split a tie across the seam.
double fold(double phi) { return (phi >= kTau - 1e-6) ? phi - kTau : phi; }

double circ_dist(double a, double b) {
  double d = wrap_angle(a - b);
  return std::min(d, kTau - d);
}

bool key_less(const std::vector<double>& a, const std::vector<double>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    double band =
        kKeyBand * std::max(1.0, std::max(std::abs(a[i]), std::abs(b[i])));
    if (std::abs(a[i] - b[i]) <= band) continue;
    return a[i] < b[i];
  }
  return a.size() < b.size();
}

// SU(2) rotation taking the given direction to the south pole.
CollectiveMap rotation_to_south(const NodeState& n) {
  cplx a0 = n.amp0(), a1 = n.amp1();
  return CollectiveMap(a1, -a0, std::conj(a0), std::conj(a1),
                       MapKind::Unitary);
}

CollectiveMap phase_map(int n, double chi) {
  cplx g = std::polar(1.0, chi / n);
  return CollectiveMap(g, 0.0, 0.0, g, MapKind::Unitary);
}

CollectiveMap z_rotation(double delta) {
  return CollectiveMap(std::polar(1.0, -delta / 2.0), 0.0, 0.0,
                       std::polar(1.0, delta / 2.0), MapKind::Unitary);
}

std::vector<DecompositionTerm>
transform_terms(const CollectiveMap& g, const std::vector<DecompositionTerm>& terms,
                int n) {
  std::vector<DecompositionTerm> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    MappedNode mn = map_node(g, t.node);
    cplx factor = std::polar(std::pow(mn.rho, static_cast<double>(n)),
                             static_cast<double>(n) * mn.delta);
    out.push_back({t.c * factor, mn.node});
  }
  return out;
}

double term_list_norm(const CoherentDecomposition& proto,
                      const std::vector<DecompositionTerm>& terms) {
  CoherentDecomposition d;
  d.n_qubits = proto.n_qubits;
  d.parity = proto.parity;
  d.terms = terms;
  return reconstruct(d).raw_norm;
}

struct TailEntry {
  double lambda;
  double xi;
  NodeState node;
};

void sort_tail(std::vector<TailEntry>& tail) {
  std::stable_sort(tail.begin(), tail.end(),
                   [](const TailEntry& a, const TailEntry& b) {
                     if (std::abs(a.lambda - b.lambda) > 1e-12 *
                             std::max(1.0, std::max(a.lambda, b.lambda)))
                       return a.lambda > b.lambda;
                     if (std::abs(a.node.theta() - b.node.theta()) > 1e-12)
                       return a.node.theta() < b.node.theta();
                     return a.node.phi() < b.node.phi();
                   });
}

// ---------------------------------------------------------------------------
// Rotation class
// ---------------------------------------------------------------------------

struct LUCandidate {
  LUCanonicalForm form;
  CollectiveMap map = CollectiveMap::identity();
  std::vector<double> key;
};

LUCandidate build_lu_candidate(const CoherentDecomposition& d, size_t lead,
                               size_t branch) {
  const int n = d.n_qubits;
  const size_t r = d.terms.size();

  CollectiveMap rot = rotation_to_south(d.terms[lead].node);
  auto t1 = transform_terms(rot, d.terms, n);
  double chi = -std::arg(t1[lead].c);

  // Order the remaining terms. The partner of an even-parity pair keeps the
  // m = 1 slot regardless of weight; everything else goes by weight.
  std::vector<size_t> tail;
  if (d.parity == Parity::Even) {
    tail.push_back(lead == 0 ? 1 : 0);
    for (size_t m = 2; m < r; ++m) tail.push_back(m);
  } else {
    for (size_t m = 0; m < r; ++m)
      if (m != lead) tail.push_back(m);
    std::stable_sort(tail.begin(), tail.end(), [&](size_t a, size_t b) {
      double ca = std::abs(t1[a].c), cb = std::abs(t1[b].c);
      if (std::abs(ca - cb) > 1e-12 * std::max(1.0, std::max(ca, cb)))
        return ca > cb;
      if (std::abs(t1[a].node.theta() - t1[b].node.theta()) > 1e-12)
        return t1[a].node.theta() < t1[b].node.theta();
      return t1[a].node.phi() < t1[b].node.phi();
    });
  }

  double rel1 = r > 1 ? std::arg(t1[tail[0]].c) - std::arg(t1[lead].c) : 0.0;
  double delta = rel1 / n + kTau * static_cast<double>(branch) / n;

  LUCandidate cand;
  cand.form.n_qubits = n;
  cand.form.parity = d.parity;
  cand.form.A = std::abs(t1[lead].c);

  double lead_arg = std::arg(t1[lead].c);
  for (size_t i = 0; i < tail.size(); ++i) {
    size_t m = tail[i];
    cand.form.y.push_back(std::abs(t1[m].c) / cand.form.A);
    double lphase = wrap_angle(std::arg(t1[m].c) - lead_arg - n * delta);
    if (i == 0) lphase = 0.0; // rotated away by construction
    if (i >= 1) cand.form.l.push_back(lphase);
    bool store_node = !(d.parity == Parity::Even && i == 0);
    if (store_node) {
      const NodeState& nd = t1[m].node;
      double phi2 = (nd.theta() < 1e-14 || nd.theta() > kPi - 1e-14)
                        ? 0.0
                        : wrap_angle(nd.phi() + delta);
      cand.form.X.push_back(NodeState::from_angles(nd.theta(), phi2));
    }
  }

  // Map: rotate, fix the global phase, spin about z, fix the phase again
  // (the z spin moves the lead coefficient's phase by n*delta/2).
  cand.map = phase_map(n, -n * delta / 2.0)
                 .compose(z_rotation(delta))
                 .compose(phase_map(n, chi))
                 .compose(rot);

  cand.key.push_back(cand.form.A);
  for (double v : cand.form.y) cand.key.push_back(v);
  for (double v : cand.form.l) cand.key.push_back(fold(v));
  for (const auto& x : cand.form.X) {
    cand.key.push_back(x.theta());
    cand.key.push_back(fold(x.phi()));
  }
  return cand;
}

// ---------------------------------------------------------------------------
// Invertible class, odd parity
// ---------------------------------------------------------------------------

struct ILCandidate {
  ILCanonicalForm form;
  CollectiveMap map = CollectiveMap::identity();
  std::vector<double> key;
  bool valid = false;
};

ILCandidate build_il_odd_candidate(const CoherentDecomposition& d, size_t p,
                                   size_t q, size_t branch) {
  ILCandidate cand;
  const int n = d.n_qubits;
  const size_t r = d.terms.size();

  cplx u0 = d.terms[p].node.amp0(), u1 = d.terms[p].node.amp1();
  cplx v0 = d.terms[q].node.amp0(), v1 = d.terms[q].node.amp1();
  cplx detM = u0 * v1 - u1 * v0;
  if (std::abs(detM) < 1e-13) return cand;
  cplx sq = std::sqrt(detM);

  // sqrt(det M) * M^{-1}: sends direction p to |0>, q to |1>, determinant 1.
  CollectiveMap g0(v1 / sq, -v0 / sq, -u1 / sq, u0 / sq,
                   MapKind::UnitDeterminant);
  auto t1 = transform_terms(g0, d.terms, n);

  cplx ratio = t1[q].c / t1[p].c;
  double mag = std::pow(std::abs(ratio), 1.0 / (2.0 * n));
  double ang = (std::arg(ratio) + kTau * static_cast<double>(branch)) / (2.0 * n);
  cplx t = std::polar(mag, ang);
  CollectiveMap dt(t, 0.0, 0.0, 1.0 / t, MapKind::UnitDeterminant);
  auto t2 = transform_terms(dt, t1, n);

  cplx sigma = t2[p].c;
  std::vector<TailEntry> tail;
  for (size_t m = 0; m < r; ++m) {
    if (m == p || m == q) continue;
    cplx rel = t2[m].c / sigma;
    tail.push_back({std::abs(rel), wrap_angle(std::arg(rel)), t2[m].node});
  }
  sort_tail(tail);

  cand.form.n_qubits = n;
  cand.form.parity = Parity::Odd;
  cand.form.A = std::abs(sigma) / term_list_norm(d, t2);
  for (const auto& e : tail) {
    cand.form.lambda.push_back(e.lambda);
    cand.form.xi.push_back(e.xi);
    cand.form.Xi.push_back(e.node);
  }
  cand.map = dt.compose(g0);

  cand.key.push_back(cand.form.A);
  for (const auto& e : tail) cand.key.push_back(e.lambda);
  for (const auto& e : tail) cand.key.push_back(fold(e.xi));
  for (const auto& e : tail) {
    cand.key.push_back(e.node.theta());
    cand.key.push_back(fold(e.node.phi()));
  }
  cand.valid = true;
  return cand;
}

// ---------------------------------------------------------------------------
// Invertible class, even parity
// ---------------------------------------------------------------------------

ILCandidate build_il_even_candidate(const CoherentDecomposition& sol,
                                    size_t i_c, size_t i_perp, size_t q,
                                    int sign, size_t branch) {
  ILCandidate cand;
  const int n = sol.n_qubits;
  const size_t r = sol.terms.size();

  cplx cc = sol.terms[i_c].c;
  cplx c1r = sol.terms[i_perp].c / cc;
  cplx cqr = sol.terms[q].c / cc;

  cplx p0 = sol.terms[i_perp].node.amp0(), p1 = sol.terms[i_perp].node.amp1();
  cplx v0 = sol.terms[q].node.amp0(), v1 = sol.terms[q].node.amp1();
  cplx detM = p0 * v1 - p1 * v0;
  if (std::abs(detM) < 1e-13) return cand;

  cplx sigma = std::sqrt(c1r * cqr * std::pow(detM, n));
  if (sign < 0) sigma = -sigma;
  if (std::abs(sigma) < 1e-300) return cand;

  cplx g0n = sigma / c1r;
  cplx g0 = std::polar(std::pow(std::abs(g0n), 1.0 / n),
                       (std::arg(g0n) + kTau * static_cast<double>(branch)) / n);
  cplx g1 = detM / g0;

  // diag(g0, g1) * M^{-1} with M = [perp, q]: perp -> |0..0>, q -> |1..1>.
  CollectiveMap g(g0 * v1 / detM, -g0 * v0 / detM, -g1 * p1 / detM,
                  g1 * p0 / detM, MapKind::UnitDeterminant);
  auto t2 = transform_terms(g, sol.terms, n);

  cplx sigma_eff = t2[i_perp].c;
  const NodeState& cnode = t2[i_c].node;
  if (cnode.theta() > kPi - 1e-9) return cand; // |c> degenerates to the pole

  cand.form.n_qubits = n;
  cand.form.parity = Parity::Even;
  cand.form.c = cnode.beta().value();
  cand.form.lam = t2[i_c].c / sigma_eff;

  std::vector<TailEntry> tail;
  for (size_t m = 0; m < r; ++m) {
    if (m == i_c || m == i_perp || m == q) continue;
    cplx rel = t2[m].c / sigma_eff;
    tail.push_back({std::abs(rel), wrap_angle(std::arg(rel)), t2[m].node});
  }
  sort_tail(tail);

  cand.form.A = std::abs(sigma_eff) / term_list_norm(sol, t2);
  for (const auto& e : tail) {
    cand.form.lambda.push_back(e.lambda);
    cand.form.xi.push_back(e.xi);
    cand.form.Xi.push_back(e.node);
  }

  ILCanonicalForm::EvenSource src;
  src.theta0 = sol.terms[i_c].node.theta();
  src.phi0 = sol.terms[i_c].node.phi();
  src.thetaq = sol.terms[q].node.theta();
  src.phiq = sol.terms[q].node.phi();
  src.c1_ratio = c1r;
  src.cq_ratio = cqr;
  cand.form.even_source = src;
  auto res = even_relation_residuals(cand.form);
  cand.form.relation_residual = std::max(res.first, res.second);

  cand.map = g;

  cand.key.push_back(cand.form.A);
  cand.key.push_back(std::abs(*cand.form.lam));
  cand.key.push_back(fold(wrap_angle(std::arg(*cand.form.lam))));
  cand.key.push_back(std::abs(*cand.form.c));
  cand.key.push_back(fold(wrap_angle(std::arg(*cand.form.c))));
  for (const auto& e : tail) cand.key.push_back(e.lambda);
  for (const auto& e : tail) cand.key.push_back(fold(e.xi));
  for (const auto& e : tail) {
    cand.key.push_back(e.node.theta());
    cand.key.push_back(fold(e.node.phi()));
  }
  cand.valid = true;
  return cand;
}

// Pair-only even states (|0..0> + |1..1> up to an invertible map) have no
// third direction to carry (c, lambda); only the pole weight survives.
ILCandidate build_il_even_pair_only(const CoherentDecomposition& sol) {
  ILCandidate cand;
  const int n = sol.n_qubits;

  cplx u0 = sol.terms[0].node.amp0(), u1 = sol.terms[0].node.amp1();
  cplx v0 = sol.terms[1].node.amp0(), v1 = sol.terms[1].node.amp1();
  cplx detM = u0 * v1 - u1 * v0;
  if (std::abs(detM) < 1e-13) return cand;
  cplx sq = std::sqrt(detM);
  CollectiveMap g0(v1 / sq, -v0 / sq, -u1 / sq, u0 / sq,
                   MapKind::UnitDeterminant);
  auto t1 = transform_terms(g0, sol.terms, n);
  cplx ratio = t1[1].c / t1[0].c;
  cplx t = std::polar(std::pow(std::abs(ratio), 1.0 / (2.0 * n)),
                      std::arg(ratio) / (2.0 * n));
  CollectiveMap dt(t, 0.0, 0.0, 1.0 / t, MapKind::UnitDeterminant);
  auto t2 = transform_terms(dt, t1, n);

  cand.form.n_qubits = n;
  cand.form.parity = Parity::Even;
  cand.form.A = std::abs(t2[0].c) / term_list_norm(sol, t2);
  cand.form.lam = cplx(0.0, 0.0);
  cand.map = dt.compose(g0);
  cand.key = {cand.form.A};
  cand.valid = true;
  return cand;
}

} // namespace

double LUCanonicalForm::n3_y() const {
  if (n_qubits != 3 || y.empty())
    throw std::logic_error("n3_y: not a two-term three-qubit form");
  return y[0];
}

double LUCanonicalForm::n3_eps() const {
  if (n_qubits != 3 || X.empty())
    throw std::logic_error("n3_eps: not a two-term three-qubit form");
  return X[0].theta();
}

double LUCanonicalForm::n3_phi() const {
  if (n_qubits != 3 || X.empty())
    throw std::logic_error("n3_phi: not a two-term three-qubit form");
  return X[0].phi();
}

std::pair<LUCanonicalForm, CollectiveMap> lu_canonical(const SymmetricState& s) {
  auto [d, diag] = decompose(s);
  (void)diag;
  const size_t r = d.terms.size();

  if (r == 1) {
    CollectiveMap rot = rotation_to_south(d.terms[0].node);
    auto t1 = transform_terms(rot, d.terms, d.n_qubits);
    CollectiveMap total =
        phase_map(d.n_qubits, -std::arg(t1[0].c)).compose(rot);
    LUCanonicalForm form;
    form.n_qubits = d.n_qubits;
    form.parity = d.parity;
    form.A = 1.0;
    return {form, total};
  }

  // Weight ties make the leading slot ambiguous; try every tied choice and
  // keep the lexicographically smallest result.
  std::vector<size_t> leads{0};
  size_t tie_limit = (d.parity == Parity::Even) ? 2 : r;
  for (size_t m = 1; m < tie_limit; ++m)
    if (std::abs(d.terms[m].c) >=
        (1.0 - 1e-9) * std::abs(d.terms[0].c))
      leads.push_back(m);

  const LUCandidate* best = nullptr;
  std::vector<LUCandidate> cands;
  cands.reserve(leads.size() * static_cast<size_t>(d.n_qubits));
  for (size_t lead : leads)
    for (size_t j = 0; j < static_cast<size_t>(d.n_qubits); ++j)
      cands.push_back(build_lu_candidate(d, lead, j));
  for (const auto& c : cands)
    if (!best || key_less(c.key, best->key)) best = &c;
  return {best->form, best->map};
}

std::pair<ILCanonicalForm, CollectiveMap> il_canonical(const SymmetricState& s) {
  if (s.n_qubits() < 3)
    throw std::invalid_argument("il_canonical: need at least 3 qubits");

  std::vector<ILCandidate> cands;
  if (s.n_qubits() % 2 == 1) {
    auto [d, diag] = decompose(s);
    (void)diag;
    const size_t r = d.terms.size();
    if (r < 2)
      throw DecompositionError(
          Fault::InsufficientTerms,
          "il_canonical: a product state has no two-pole normal form");
    for (size_t p = 0; p < r; ++p)
      for (size_t q = 0; q < r; ++q) {
        if (p == q) continue;
        for (size_t j = 0; j < 2 * static_cast<size_t>(d.n_qubits); ++j) {
          ILCandidate c = build_il_odd_candidate(d, p, q, j);
          if (c.valid) cands.push_back(std::move(c));
        }
      }
  } else {
    // The reduction starts from the expansion itself (the one maximizing the
    // leading weight): the partner term goes to |0..0>, the largest free
    // term to |1..1>, and the leading term becomes the lambda |c> term. Only
    // the residual sign and root-of-unity choices are left to enumerate;
    // they share every magnitude, so the ranking only settles phases.
    auto [sol, diag] = decompose(s);
    (void)diag;
    const size_t r = sol.terms.size();
    if (r < 2)
      throw DecompositionError(
          Fault::InsufficientTerms,
          "il_canonical: a product state has no two-pole normal form");
    if (r == 2) {
      ILCandidate c = build_il_even_pair_only(sol);
      if (c.valid) cands.push_back(std::move(c));
    } else {
      for (int sign : {+1, -1})
        for (size_t j = 0; j < static_cast<size_t>(sol.n_qubits); ++j) {
          ILCandidate c = build_il_even_candidate(sol, 0, 1, 2, sign, j);
          if (c.valid) cands.push_back(std::move(c));
        }
    }
  }

  if (cands.empty())
    throw DecompositionError(Fault::SolverFailure,
                             "il_canonical: no admissible reduction found");
  const ILCandidate* best = nullptr;
  for (const auto& c : cands)
    if (!best || key_less(c.key, best->key)) best = &c;
  return {best->form, best->map};
}

namespace {

bool near_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

bool near_cplx(cplx a, cplx b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

bool near_node(const NodeState& a, const NodeState& b, double tol) {
  return chordal(a, b) <= 2.0 * tol;
}

bool forms_match(const LUCanonicalForm& a, const LUCanonicalForm& b,
                 double tol) {
  if (a.n_qubits != b.n_qubits || a.parity != b.parity) return false;
  if (a.y.size() != b.y.size() || a.l.size() != b.l.size() ||
      a.X.size() != b.X.size())
    return false;
  if (!near_rel(a.A, b.A, tol)) return false;
  for (size_t i = 0; i < a.y.size(); ++i)
    if (!near_rel(a.y[i], b.y[i], tol)) return false;
  for (size_t i = 0; i < a.l.size(); ++i)
    if (circ_dist(a.l[i], b.l[i]) > tol) return false;
  for (size_t i = 0; i < a.X.size(); ++i)
    if (!near_node(a.X[i], b.X[i], tol)) return false;
  return true;
}

bool forms_match(const ILCanonicalForm& a, const ILCanonicalForm& b,
                 double tol) {
  if (a.n_qubits != b.n_qubits || a.parity != b.parity) return false;
  if (a.lambda.size() != b.lambda.size() || a.Xi.size() != b.Xi.size())
    return false;
  if (a.c.has_value() != b.c.has_value() ||
      a.lam.has_value() != b.lam.has_value())
    return false;
  if (!near_rel(a.A, b.A, tol)) return false;
  if (a.c && !near_cplx(*a.c, *b.c, tol)) return false;
  if (a.lam && !near_cplx(*a.lam, *b.lam, tol)) return false;
  for (size_t i = 0; i < a.lambda.size(); ++i)
    if (!near_rel(a.lambda[i], b.lambda[i], tol)) return false;
  for (size_t i = 0; i < a.xi.size(); ++i)
    if (circ_dist(a.xi[i], b.xi[i]) > tol) return false;
  for (size_t i = 0; i < a.Xi.size(); ++i)
    if (!near_node(a.Xi[i], b.Xi[i], tol)) return false;
  return true;
}

} // namespace

bool equivalent(const SymmetricState& s1, const SymmetricState& s2,
                EquivalenceMode mode, double tol) {
  if (mode == EquivalenceMode::LU) {
    auto f1 = lu_canonical(s1);
    auto f2 = lu_canonical(s2);
    return forms_match(f1.first, f2.first, tol);
  }
  bool sep1 = false, sep2 = false;
  std::optional<ILCanonicalForm> f1, f2;
  try {
    f1 = il_canonical(s1).first;
  } catch (const DecompositionError& e) {
    if (e.fault() != Fault::InsufficientTerms) throw;
    sep1 = true;
  }
  try {
    f2 = il_canonical(s2).first;
  } catch (const DecompositionError& e) {
    if (e.fault() != Fault::InsufficientTerms) throw;
    sep2 = true;
  }
  if (sep1 || sep2) return sep1 && sep2;
  return forms_match(*f1, *f2, tol);
}

std::pair<double, double> even_relation_residuals(const ILCanonicalForm& form) {
  if (!form.even_source || !form.c || !form.lam) return {0.0, 0.0};
  const auto& es = *form.even_source;
  const int n = form.n_qubits;
  double t0 = es.theta0 / 2.0, tq = es.thetaq / 2.0;
  cplx e0 = std::polar(1.0, es.phi0), eq = std::polar(1.0, es.phiq);
  cplx W = e0 * std::sin(t0) * std::cos(tq) - eq * std::cos(t0) * std::sin(tq);
  cplx V = e0 * std::cos(t0) * std::cos(tq) + eq * std::sin(t0) * std::sin(tq);
  cplx c = *form.c, lam = *form.lam;

  cplx pred_lam = std::pow(1.0 + std::norm(c), n / 2.0) *
                  std::pow(W / V, n) / es.c1_ratio;
  double r1 = std::abs(lam - pred_lam) / (1.0 + std::abs(lam));

  cplx cn = std::pow(c, n);
  cplx pred_cn = (es.c1_ratio / es.cq_ratio) * std::polar(1.0, n * es.phi0) /
                 std::pow(W, n);
  double r2 = std::abs(cn - pred_cn) / (1.0 + std::abs(cn));
  return {r1, r2};
}

} // namespace symdecomp
