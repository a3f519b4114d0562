#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "symdecomp/canonical.hpp"
#include "symdecomp/errors.hpp"
#include "symdecomp/io.hpp"
#include "symdecomp/majorana.hpp"
#include "symdecomp/measures.hpp"
#include "symdecomp/selftest.hpp"

using namespace symdecomp;

namespace {

int fault_exit_code(Fault f) {
  switch (f) {
    case Fault::NonGeneric: return 3;
    case Fault::SolverFailure: return 4;
    case Fault::TieBreakUnstable: return 5;
    case Fault::InsufficientTerms: return 1;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::ParseError(0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SymmetricState load_state(const std::string& path) {
  std::string warning;
  SymmetricState s = io::parse_state_file(read_file(path), &warning);
  if (!warning.empty()) std::cerr << "warning: " << path << ": " << warning << "\n";
  return s;
}

std::uint64_t seed_or_env(std::uint64_t seed, bool seed_given) {
  if (seed_given) return seed;
  if (const char* env = std::getenv("SYMDECOMP_SEED"))
    return std::strtoull(env, nullptr, 10);
  return seed;
}

const char* kind_name(MapKind k) {
  switch (k) {
    case MapKind::Unitary: return "unitary";
    case MapKind::UnitDeterminant: return "unit-determinant";
    case MapKind::GeneralInvertible: return "general-invertible";
  }
  return "unknown";
}

void put_node(io::ReportDocument& rep, const std::string& key,
              const NodeState& node) {
  rep.put(key + "_theta", node.theta());
  rep.put(key + "_phi", node.phi());
}

void put_map(io::ReportDocument& rep, const CollectiveMap& g) {
  rep.section("map");
  rep.put("a", g.a());
  rep.put("b", g.b());
  rep.put("d", g.d());
  rep.put("f", g.f());
  rep.put("det", g.det());
  rep.put("kind", std::string(kind_name(g.kind())));
}

void put_decomposition(io::ReportDocument& rep, const CoherentDecomposition& d,
                       const DecompositionDiagnostics& diag) {
  rep.section("decomposition");
  rep.put("n", d.n_qubits);
  rep.put("r", static_cast<int>(d.terms.size()));
  rep.put("A", std::abs(d.A()));
  for (size_t m = 0; m < d.terms.size(); ++m) {
    std::string idx = std::to_string(m);
    rep.put("c_" + idx, d.terms[m].c);
    put_node(rep, "node_" + idx, d.terms[m].node);
  }
  std::vector<double> y = d.y(), k = d.k();
  for (size_t m = 1; m < y.size(); ++m)
    rep.put("y_" + std::to_string(m), y[m]);
  for (size_t m = 1; m < k.size(); ++m)
    rep.put("k_" + std::to_string(m), k[m]);
  rep.section("diagnostics");
  rep.put("fidelity_deficit", diag.reconstruction_fidelity_deficit);
  rep.put("max_determinant_residual", diag.max_determinant_residual);
  rep.put("max_root_residual", diag.max_root_residual);
  rep.put("value_at_zero_residual", diag.value_at_zero_residual);
  for (size_t i = 0; i < diag.notes.size(); ++i)
    rep.put("note_" + std::to_string(i), diag.notes[i]);
}

void put_lu_form(io::ReportDocument& rep, const std::string& name,
                 const LUCanonicalForm& f) {
  rep.section(name);
  rep.put("n", f.n_qubits);
  rep.put("parity", std::string(f.parity == Parity::Odd ? "odd" : "even"));
  rep.put("A", f.A);
  for (size_t i = 0; i < f.y.size(); ++i)
    rep.put("y_" + std::to_string(i + 1), f.y[i]);
  for (size_t i = 0; i < f.l.size(); ++i)
    rep.put("l_" + std::to_string(i + 2), f.l[i]);
  size_t base = (f.parity == Parity::Even) ? 2 : 1;
  for (size_t i = 0; i < f.X.size(); ++i)
    put_node(rep, "X_" + std::to_string(base + i), f.X[i]);
}

void put_il_form(io::ReportDocument& rep, const std::string& name,
                 const ILCanonicalForm& f) {
  rep.section(name);
  rep.put("n", f.n_qubits);
  rep.put("parity", std::string(f.parity == Parity::Odd ? "odd" : "even"));
  rep.put("A", f.A);
  if (f.c) rep.put("c", *f.c);
  if (f.lam) rep.put("lam", *f.lam);
  size_t base = (f.parity == Parity::Even) ? 3 : 2;
  for (size_t i = 0; i < f.lambda.size(); ++i)
    rep.put("lambda_" + std::to_string(base + i), f.lambda[i]);
  for (size_t i = 0; i < f.xi.size(); ++i)
    rep.put("xi_" + std::to_string(base + i), f.xi[i]);
  for (size_t i = 0; i < f.Xi.size(); ++i)
    put_node(rep, "Xi_" + std::to_string(base + i), f.Xi[i]);
  if (f.even_source) rep.put("relation_residual", f.relation_residual);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherent-expansion toolkit for symmetric multiqubit states"};
  app.require_subcommand(1);

  std::string file, file2, out_path, mode = "lu";
  double tol = 1e-9;
  double cmp_tol = 1e-7;
  int n_qubits = 0, count = 1, n_max = 8;
  std::uint64_t seed = 1;

  auto* cmd_decompose = app.add_subcommand("decompose", "minimal coherent expansion");
  cmd_decompose->add_option("file", file)->required();
  cmd_decompose->add_option("--tol", tol, "accepted fidelity deficit");

  auto* cmd_roots = app.add_subcommand("roots", "stellar constellation");
  cmd_roots->add_option("file", file)->required();

  auto* cmd_canonical = app.add_subcommand("canonical", "normal form reduction");
  cmd_canonical->add_option("file", file)->required();
  cmd_canonical->add_option("--mode", mode, "lu or il")
      ->check(CLI::IsMember({"lu", "il"}));

  auto* cmd_compare = app.add_subcommand("compare", "class equality of two states");
  cmd_compare->add_option("file1", file)->required();
  cmd_compare->add_option("file2", file2)->required();
  cmd_compare->add_option("--mode", mode, "lu or il")
      ->check(CLI::IsMember({"lu", "il"}));
  cmd_compare->add_option("--tol", cmp_tol, "form comparison tolerance");

  auto* cmd_tangle = app.add_subcommand("tangle", "three-qubit tangle, three routes");
  cmd_tangle->add_option("file", file)->required();

  auto* cmd_schmidt = app.add_subcommand("schmidt", "expansion length measure");
  cmd_schmidt->add_option("file", file)->required();

  auto* cmd_bloch = app.add_subcommand("bloch-export", "node vectors as CSV");
  cmd_bloch->add_option("file", file)->required();
  cmd_bloch->add_option("--out", out_path)->required();

  auto* cmd_random = app.add_subcommand("random", "random symmetric states");
  cmd_random->add_option("--n", n_qubits)->required();
  auto* seed_opt = cmd_random->add_option("--seed", seed);
  cmd_random->add_option("--count", count);

  auto* cmd_verify = app.add_subcommand("verify", "randomized property suite");
  auto* vseed_opt = cmd_verify->add_option("--seed", seed);
  cmd_verify->add_option("--n-max", n_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cmd_decompose)) {
      SymmetricState s = load_state(file);
      auto [d, diag] = decompose(s, tol);
      io::ReportDocument rep;
      put_decomposition(rep, d, diag);
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_roots)) {
      SymmetricState s = load_state(file);
      RootMultiset roots = majorana_roots(majorana_polynomial(s));
      GenericityReport gen = genericity(s);
      io::ReportDocument rep;
      rep.section("roots");
      rep.put("n", s.n_qubits());
      rep.put("count", static_cast<int>(roots.roots.size()));
      for (size_t i = 0; i < roots.roots.size(); ++i) {
        const auto& e = roots.roots[i];
        std::string idx = std::to_string(i);
        if (e.location.is_inf())
          rep.put("root_" + idx, std::string("inf"));
        else
          rep.put("root_" + idx, e.location.value());
        rep.put("mult_" + idx, e.multiplicity);
      }
      rep.put("gamma", gen.gamma);
      rep.put_bool("generic", gen.generic);
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_canonical)) {
      SymmetricState s = load_state(file);
      io::ReportDocument rep;
      if (mode == "lu") {
        auto [f, g] = lu_canonical(s);
        put_lu_form(rep, "lu_form", f);
        put_map(rep, g);
      } else {
        auto [f, g] = il_canonical(s);
        put_il_form(rep, "il_form", f);
        put_map(rep, g);
      }
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_compare)) {
      SymmetricState s1 = load_state(file);
      SymmetricState s2 = load_state(file2);
      EquivalenceMode m = (mode == "lu") ? EquivalenceMode::LU : EquivalenceMode::IL;
      bool eq = equivalent(s1, s2, m, cmp_tol);
      io::ReportDocument rep;
      rep.section("compare");
      rep.put("mode", mode);
      rep.put_bool("equivalent", eq);
      auto describe = [&](const std::string& name, const SymmetricState& s) {
        try {
          if (m == EquivalenceMode::LU) {
            auto [f, g] = lu_canonical(s);
            (void)g;
            put_lu_form(rep, name, f);
          } else {
            auto [f, g] = il_canonical(s);
            (void)g;
            put_il_form(rep, name, f);
          }
        } catch (const DecompositionError& e) {
          rep.section(name);
          rep.put("error", std::string(fault_name(e.fault())));
        }
      };
      describe("form_1", s1);
      describe("form_2", s2);
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_tangle)) {
      SymmetricState s = load_state(file);
      if (s.n_qubits() != 3) {
        std::cerr << "parse-error: tangle requires a 3-qubit state\n";
        return 2;
      }
      ThreeTangleResult t = three_tangle(s);
      io::ReportDocument rep;
      rep.section("tangle");
      if (t.from_decomposition)
        rep.put("from_decomposition", *t.from_decomposition);
      else
        rep.put("from_decomposition", std::string("unavailable"));
      if (t.from_canonical_form)
        rep.put("from_canonical_form", *t.from_canonical_form);
      else
        rep.put("from_canonical_form", std::string("unavailable"));
      rep.put("oracle", t.oracle);
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_schmidt)) {
      SymmetricState s = load_state(file);
      auto [d, diag] = decompose(s);
      (void)diag;
      SchmidtMeasure sm = schmidt_measure(d);
      io::ReportDocument rep;
      rep.section("schmidt");
      rep.put("r", sm.r);
      rep.put("P", sm.P);
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_bloch)) {
      SymmetricState s = load_state(file);
      auto [d, diag] = decompose(s);
      (void)diag;
      std::vector<double> y = d.y();
      std::ofstream csv(out_path, std::ios::binary);
      if (!csv) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 1;
      }
      csv << "label,x,y,z,length\n";
      for (size_t m = 0; m < d.terms.size(); ++m) {
        const NodeState& node = d.terms[m].node;
        double len = y[m];
        double sx = std::sin(node.theta()) * std::cos(node.phi());
        double sy = std::sin(node.theta()) * std::sin(node.phi());
        double sz = std::cos(node.theta());
        csv << "node_" << m << "," << io::format_real(len * sx) << ","
            << io::format_real(len * sy) << "," << io::format_real(len * sz)
            << "," << io::format_real(len) << "\n";
      }
      io::ReportDocument rep;
      rep.section("bloch_export");
      rep.put("rows", static_cast<int>(d.terms.size()));
      rep.put("out", out_path);
      std::cout << rep.str();
      return 0;
    }

    if (app.got_subcommand(cmd_random)) {
      std::uint64_t s0 = seed_or_env(seed, seed_opt->count() > 0);
      if (n_qubits < 2) {
        std::cerr << "parse-error: --n must be at least 2\n";
        return 2;
      }
      std::mt19937_64 rng(s0);
      for (int i = 0; i < count; ++i) {
        SymmetricState s = random_state(n_qubits, rng);
        try {
          decompose(s);
        } catch (const DecompositionError& e) {
          std::cerr << "warning: state " << i << " admits no expansion ("
                    << fault_name(e.fault()) << ")\n";
        }
        std::cout << io::write_state_file(
            s, "random state " + std::to_string(i) + " of " +
                   std::to_string(count) + ", n=" + std::to_string(n_qubits) +
                   ", seed=" + std::to_string(s0));
      }
      return 0;
    }

    if (app.got_subcommand(cmd_verify)) {
      SelftestConfig cfg;
      cfg.seed = seed_or_env(seed, vseed_opt->count() > 0);
      cfg.n_max = n_max;
      bool ok = run_selftest(cfg, std::cout);
      return ok ? 0 : 1;
    }
  } catch (const io::ParseError& e) {
    std::cerr << "parse-error: " << e.what() << "\n";
    return 2;
  } catch (const DecompositionError& e) {
    std::cerr << fault_name(e.fault()) << ": " << e.what() << "\n";
    return fault_exit_code(e.fault());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
