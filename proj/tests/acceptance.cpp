// End-to-end acceptance gate. Each numbered check prints exactly one
// PASS/FAIL line; the process exit code is the number of failures.
// Tolerances are pinned here, next to the check that uses them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "symdecomp/canonical.hpp"
#include "symdecomp/errors.hpp"
#include "symdecomp/measures.hpp"
#include "symdecomp/symstate.hpp"

using namespace symdecomp;

namespace {

int failures = 0;

void report(int id, const char* label, bool ok, const std::string& detail = "") {
  std::printf("criterion %2d (%s): %s\n", id, label, ok ? "PASS" : "FAIL");
  if (!detail.empty()) std::printf("    %s\n", detail.c_str());
  if (!ok) ++failures;
}

double unif(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SymmetricState ghz3() {
  double a = std::sqrt(0.5);
  return SymmetricState(3, {a, 0.0, 0.0, a});
}

SymmetricState dicke(int n, int k) {
  std::vector<cplx> c(static_cast<size_t>(n) + 1, 0.0);
  c[static_cast<size_t>(k)] = 1.0;
  return SymmetricState(n, c);
}

// Draw until the expansion engine accepts the state; count the rejects.
SymmetricState accepted_state(int n, std::mt19937_64& rng, long& rejects) {
  for (;;) {
    SymmetricState s = random_state(n, rng);
    try {
      decompose(s);
      return s;
    } catch (const DecompositionError&) {
      ++rejects;
    }
  }
}

struct Planted {
  std::vector<DecompositionTerm> terms;
  SymmetricState state;
  cplx w; // factor mapping planted coefficients onto the normalized state
};

// Minimal-length expansion with nodes at least 0.25 apart (chordal), strictly
// ordered magnitudes, and the diametric pair that even lengths require.
Planted plant(int n, std::mt19937_64& rng) {
  const size_t r = static_cast<size_t>((n % 2 == 0) ? n / 2 + 1 : (n + 1) / 2);
  std::vector<DecompositionTerm> terms(r);
  for (;;) {
    for (size_t m = 0; m < r; ++m) {
      terms[m].node = NodeState::from_angles(std::acos(1.0 - 2.0 * unif(rng)),
                                             kTau * unif(rng));
      terms[m].c = std::polar(1.3 * std::pow(0.77, static_cast<double>(m)),
                              kTau * unif(rng));
    }
    if (n % 2 == 0)
      terms[1].node = NodeState::from_beta(antipode(terms[0].node.beta()));
    bool spread = true;
    for (size_t i = 0; i < r && spread; ++i)
      for (size_t j = i + 1; j < r; ++j)
        if (chordal(terms[i].node, terms[j].node) < 0.25) {
          spread = false;
          break;
        }
    if (!spread) continue;

    std::vector<cplx> acc(static_cast<size_t>(n) + 1, 0.0);
    for (const auto& tm : terms) {
      SymmetricState coh = coherent_state(n, tm.node);
      for (int k = 0; k <= n; ++k) acc[static_cast<size_t>(k)] += tm.c * coh[k];
    }
    SymmetricState raw(n, acc);
    SymmetricState norm = raw.normalized();
    int lead = 0;
    while (std::abs(raw[lead]) < 1e-8) ++lead;
    return {terms, norm, norm[lead] / raw[lead]};
  }
}

// Every planted term must have a recovered partner: node within tol (chordal)
// and coefficient within tol once the normalization factor is applied.
bool matches(const CoherentDecomposition& d, const Planted& p, double tol) {
  if (d.terms.size() != p.terms.size()) return false;
  std::vector<bool> used(d.terms.size(), false);
  for (const auto& want : p.terms) {
    bool hit = false;
    for (size_t j = 0; j < d.terms.size(); ++j) {
      if (used[j]) continue;
      if (chordal(d.terms[j].node, want.node) > tol) continue;
      if (std::abs(d.terms[j].c - want.c * p.w) > tol) continue;
      used[j] = hit = true;
      break;
    }
    if (!hit) return false;
  }
  return true;
}

double phase_dist(double a, double b) {
  double w = wrap_angle(a - b);
  return std::min(w, kTau - w);
}

double lu_form_gap(const LUCanonicalForm& a, const LUCanonicalForm& b) {
  if (a.n_qubits != b.n_qubits || a.y.size() != b.y.size() ||
      a.l.size() != b.l.size() || a.X.size() != b.X.size())
    return 1e9;
  double d = std::abs(a.A - b.A);
  for (size_t i = 0; i < a.y.size(); ++i) d = std::max(d, std::abs(a.y[i] - b.y[i]));
  for (size_t i = 0; i < a.l.size(); ++i) d = std::max(d, phase_dist(a.l[i], b.l[i]));
  for (size_t i = 0; i < a.X.size(); ++i) d = std::max(d, chordal(a.X[i], b.X[i]));
  return d;
}

double il_form_gap(const ILCanonicalForm& a, const ILCanonicalForm& b) {
  if (a.n_qubits != b.n_qubits || a.lambda.size() != b.lambda.size() ||
      a.xi.size() != b.xi.size() || a.Xi.size() != b.Xi.size() ||
      a.c.has_value() != b.c.has_value() || a.lam.has_value() != b.lam.has_value())
    return 1e9;
  // the squeeze parameters are unbounded, so compare those relatively
  auto rel = [](auto x, auto y) {
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
  };
  double d = std::abs(a.A - b.A);
  if (a.c) d = std::max(d, std::abs(*a.c - *b.c));
  if (a.lam) d = std::max(d, rel(*a.lam, *b.lam));
  for (size_t i = 0; i < a.lambda.size(); ++i)
    d = std::max(d, rel(a.lambda[i], b.lambda[i]));
  for (size_t i = 0; i < a.xi.size(); ++i)
    d = std::max(d, phase_dist(a.xi[i], b.xi[i]));
  for (size_t i = 0; i < a.Xi.size(); ++i)
    d = std::max(d, chordal(a.Xi[i], b.Xi[i]));
  return d;
}

// ---- 1 & 9: round trip fidelity + algebraic residuals on every acceptance

void criterion_1_and_9() {
  const double kFidTol = 1e-9;
  const double kResidualTol = 1e-8;
  std::mt19937_64 rng(101);
  auto t0 = std::chrono::steady_clock::now();
  bool fid_ok = true, res_ok = true;
  long rejects_total = 0;
  double worst_deficit = 0.0, worst_residual = 0.0;
  for (int n = 3; n <= 12; ++n) {
    long rejects = 0;
    for (int rep = 0; rep < 200; ++rep) {
      SymmetricState s = accepted_state(n, rng, rejects);
      auto [d, diag] = decompose(s);
      Reconstruction rec = reconstruct(d);
      double deficit = 1.0 - std::abs(overlap(rec.state.normalized(),
                                              s.normalized()));
      worst_deficit = std::max(worst_deficit, deficit);
      if (deficit > kFidTol) fid_ok = false;

      DecompositionDiagnostics v = verify_expansion_conditions(d, s);
      double r = std::max({v.max_determinant_residual, v.max_root_residual,
                           v.value_at_zero_residual});
      worst_residual = std::max(worst_residual, r);
      if (r > kResidualTol) res_ok = false;
    }
    rejects_total += rejects;
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "2000 states, worst deficit %.2e, %ld rejected draws, %.1f s",
                worst_deficit, rejects_total, secs);
  report(1, "round trip fidelity", fid_ok && secs < 60.0, buf);
  std::snprintf(buf, sizeof buf, "worst algebraic residual %.2e", worst_residual);
  report(9, "expansion condition residuals", res_ok, buf);
}

// ---- 2: synthesized expansions are recovered exactly

void criterion_2() {
  const double kTol = 1e-7;
  std::mt19937_64 rng(202);
  bool ok = true;
  std::string detail;
  for (int n = 3; n <= 10; ++n) {
    for (int rep = 0; rep < 25; ++rep) {
      Planted p = plant(n, rng);
      try {
        if (n % 2 == 1) {
          auto [d, diag] = decompose(p.state);
          (void)diag;
          if (!matches(d, p, kTol)) ok = false;
        } else {
          // even lengths admit several expansions; the planted one must be
          // among them
          bool found = false;
          for (const auto& d : all_decompositions(p.state))
            if (matches(d, p, kTol)) {
              found = true;
              break;
            }
          if (!found) ok = false;
        }
      } catch (const DecompositionError& e) {
        ok = false;
        detail = std::string("n=") + std::to_string(n) + ": " + e.what();
      }
    }
  }
  report(2, "synthesis recovery", ok, detail);
}

// ---- 3: the balanced cat state

void criterion_3() {
  const double kTol = 1e-10;
  bool ok = true;
  try {
    auto [d, diag] = decompose(ghz3());
    (void)diag;
    ok = d.terms.size() == 2 &&
         std::abs(d.y()[1] - 1.0) <= kTol &&
         std::abs(node_overlap(d.terms[0].node, d.terms[1].node)) <= kTol;
    SchmidtMeasure sm = schmidt_measure(d);
    ok = ok && sm.r == 2 && sm.P == 1.0;
  } catch (const std::exception&) {
    ok = false;
  }
  report(3, "cat state geometry", ok);
}

// ---- 4: intermediate excitation-number states are rejected

void criterion_4() {
  bool ok = true;
  std::string detail;
  for (int n = 3; n <= 8; ++n)
    for (int k = 1; k < n; ++k) {
      try {
        decompose(dicke(n, k));
        ok = false;
        detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                 " was accepted";
      } catch (const DecompositionError& e) {
        if (e.fault() != Fault::NonGeneric) {
          ok = false;
          detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                   " raised " + fault_name(e.fault());
        }
      }
    }
  report(4, "excitation-number state rejection", ok, detail);
}

// ---- 5: rotation covariance of invariants and normal forms

void criterion_5() {
  const double kTol = 1e-7;
  std::mt19937_64 rng(505);
  bool ok = true;
  long rejects = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    int n = 3 + rep % 7; // 3..9
    SymmetricState s = accepted_state(n, rng, rejects);
    CollectiveMap u = random_unitary(rng);
    SymmetricState img = apply_collective(u, s).state;
    try {
      auto [da, xa] = decompose(s);
      auto [db, xb] = decompose(img);
      (void)xa; (void)xb;
      InvariantSet ia = lu_invariants(da), ib = lu_invariants(db);
      double gap = std::abs(ia.A - ib.A);
      if (ia.y.size() != ib.y.size() || ia.gram.size() != ib.gram.size()) {
        gap = 1e9;
      } else {
        for (size_t i = 0; i < ia.y.size(); ++i)
          gap = std::max(gap, std::abs(ia.y[i] - ib.y[i]));
        for (size_t i = 0; i < ia.gram.size(); ++i)
          for (size_t j = 0; j < ia.gram.size(); ++j)
            gap = std::max(gap, std::abs(std::abs(ia.gram[i][j]) -
                                         std::abs(ib.gram[i][j])));
      }
      auto [fa, ga] = lu_canonical(s);
      auto [fb, gb] = lu_canonical(img);
      (void)ga; (void)gb;
      gap = std::max(gap, lu_form_gap(fa, fb));
      worst = std::max(worst, gap);
      if (gap > kTol) ok = false;
    } catch (const std::exception&) {
      ok = false;
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst gap %.2e over 100 rotation pairs", worst);
  report(5, "rotation covariance", ok, buf);
}

// ---- 6: invertible-map invariance of the normal form

void criterion_6() {
  const double kFormTol = 1e-6;
  const double kRelationTol = 1e-9;
  std::mt19937_64 rng(606);
  long rejects = 0;
  int odd_pass = 0, even_pass = 0, relation_pass = 0, relation_seen = 0;
  double worst_odd = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    bool odd = rep < 50;
    int n = odd ? 3 + 2 * (rep % 4) : 4 + 2 * (rep % 3); // 3,5,7,9 / 4,6,8
    SymmetricState s = accepted_state(n, rng, rejects);
    CollectiveMap g = random_unit_determinant(rng);
    SymmetricState img = apply_collective(g, s).state;
    try {
      auto [fa, ma] = il_canonical(s);
      auto [fb, mb] = il_canonical(img);
      (void)ma; (void)mb;
      double gap = il_form_gap(fa, fb);
      if (odd) {
        worst_odd = std::max(worst_odd, gap);
        if (gap <= kFormTol) ++odd_pass;
      } else {
        if (gap <= kFormTol) ++even_pass;
        for (const ILCanonicalForm* f : {&fa, &fb})
          if (f->c) {
            ++relation_seen;
            auto [r1, r2] = even_relation_residuals(*f);
            if (std::max(r1, r2) <= kRelationTol) ++relation_pass;
          }
      }
    } catch (const std::exception&) {
      // counts as a miss for this pair
    }
  }
  bool ok = odd_pass == 50 && even_pass == 50 &&
            relation_pass == relation_seen;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "odd %d/50 (worst gap %.2e), even %d/50, parameter relation "
                "%d/%d; the even form tracks the expansion branch, which the "
                "map action can switch",
                odd_pass, worst_odd, even_pass, relation_pass, relation_seen);
  report(6, "invertible-map invariance", ok, buf);
}

// ---- 7: root constellations move by the induced sphere map

void criterion_7() {
  const double kTol = 1e-8;
  std::mt19937_64 rng(707);
  bool ok = true;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    int n = 3 + rep % 10; // 3..12
    SymmetricState s = random_state(n, rng);
    CollectiveMap g = random_unit_determinant(rng);
    RootMultiset before = majorana_roots(majorana_polynomial(s));
    RootMultiset direct =
        majorana_roots(majorana_polynomial(apply_collective(g, s).state));
    RootMultiset moved = mobius_on_roots(g, before);
    if (direct.total() != n || moved.total() != n) {
      ok = false;
      continue;
    }
    // flatten multiplicities: the two computations may cluster nearly equal
    // roots differently, but the n sphere points must coincide
    auto flatten = [](const RootMultiset& r) {
      std::vector<ExtComplex> pts;
      for (const auto& e : r.roots)
        for (int m = 0; m < e.multiplicity; ++m) pts.push_back(e.location);
      return pts;
    };
    std::vector<ExtComplex> want = flatten(direct), got = flatten(moved);
    std::vector<bool> used(got.size(), false);
    for (const auto& e : want) {
      bool hit = false;
      for (size_t j = 0; j < got.size(); ++j) {
        if (used[j]) continue;
        double dist = chordal(e, got[j]);
        if (dist < kTol) {
          worst = std::max(worst, dist);
          used[j] = hit = true;
          break;
        }
      }
      if (!hit) ok = false;
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst matched distance %.2e", worst);
  report(7, "sphere-map covariance of roots", ok, buf);
}

// ---- 8: the three tangle routes agree

void criterion_8() {
  const double kAgreeTol = 1e-9;
  const double kExactTol = 1e-10;
  std::mt19937_64 rng(808);
  bool ok = true;
  long rejects = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    SymmetricState s = accepted_state(3, rng, rejects);
    ThreeTangleResult t = three_tangle(s);
    if (!t.from_decomposition || !t.from_canonical_form) {
      ok = false;
      continue;
    }
    double spread = std::max({std::abs(*t.from_decomposition - t.oracle),
                              std::abs(*t.from_canonical_form - t.oracle),
                              std::abs(*t.from_decomposition -
                                       *t.from_canonical_form)});
    worst = std::max(worst, spread);
    if (spread > kAgreeTol) ok = false;
  }
  ThreeTangleResult cat = three_tangle(ghz3());
  ok = ok && cat.from_decomposition && cat.from_canonical_form &&
       std::abs(*cat.from_decomposition - 1.0) <= kExactTol &&
       std::abs(*cat.from_canonical_form - 1.0) <= kExactTol &&
       std::abs(cat.oracle - 1.0) <= kExactTol;
  ThreeTangleResult w = three_tangle(dicke(3, 1));
  ok = ok && std::abs(w.oracle) <= kExactTol;
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst spread %.2e over 1000 states", worst);
  report(8, "tangle triple agreement", ok, buf);
}

// ---- 10: closed-form tangle is monotone on the parameter grid

void criterion_10() {
  bool ok = true;
  for (double phi : {0.0, 0.9, 2.2, 5.0}) {
    for (int i = 0; i < 50 && ok; ++i) {
      double eps = kPi * (static_cast<double>(i) + 0.5) / 50.0;
      double prev = -1.0;
      for (int j = 1; j <= 50; ++j) {
        double v = canonical_three_tangle(static_cast<double>(j) / 50.0, eps, phi);
        if (!(v > prev)) ok = false;
        prev = v;
      }
    }
    for (int j = 1; j <= 50 && ok; ++j) {
      double y = static_cast<double>(j) / 50.0;
      double prev = 2.0;
      for (int i = 0; i < 50; ++i) {
        double eps = kPi * (static_cast<double>(i) + 0.5) / 50.0;
        double v = canonical_three_tangle(y, eps, phi);
        if (!(v < prev)) ok = false;
        prev = v;
      }
    }
  }
  report(10, "closed-form tangle monotonicity", ok,
         "50x50 grid at four phase offsets, strict in both directions");
}

} // namespace

int main() {
  criterion_1_and_9();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
