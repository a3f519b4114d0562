#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "symdecomp/io.hpp"

#include <cmath>
#include <random>

using namespace symdecomp;

TEST_CASE("write then parse preserves states to machine precision") {
  std::mt19937_64 rng(42);
  for (int n = 2; n <= 12; ++n) {
    // one normalize+rephase pass puts the state in the file convention,
    // so the second pass only sees rounding noise
    SymmetricState s = io::parse_state_file(
        io::write_state_file(random_state(n, rng)));
    std::string text = io::write_state_file(s, "round trip n=" + std::to_string(n));
    std::string warning;
    SymmetricState back = io::parse_state_file(text, &warning);
    CHECK(warning.empty());
    REQUIRE(back.n_qubits() == n);
    for (int k = 0; k <= n; ++k)
      CHECK(std::abs(back[k] - s[k]) < 5e-15);
  }
}

TEST_CASE("comments, blank lines and shuffled indices are accepted") {
  std::string text =
      "# header comment\n"
      "\n"
      "N 2\n"
      "2 0.5 0.0   # trailing comment\n"
      "0 0.5 0.0\n"
      "\t1 0.70710678118654752 0.0\n";
  SymmetricState s = io::parse_state_file(text);
  CHECK(s.n_qubits() == 2);
  CHECK(s[0].real() == doctest::Approx(0.5));
  CHECK(s[1].real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(s[2].real() == doctest::Approx(0.5));
}

TEST_CASE("non-unit input is renormalized with a warning") {
  std::string warning;
  SymmetricState s =
      io::parse_state_file("N 2\n0 2 0\n1 0 0\n2 0 0\n", &warning);
  CHECK(!warning.empty());
  CHECK(s.norm() == doctest::Approx(1.0));
  CHECK(s[0].real() == doctest::Approx(1.0));
}

TEST_CASE("parse errors carry the offending line number") {
  auto line_of = [](const std::string& text) {
    try {
      io::parse_state_file(text);
    } catch (const io::ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("M 3\n") == 1);                               // bad header tag
  CHECK(line_of("N x\n") == 1);                               // unreadable count
  CHECK(line_of("N 3 7\n") == 1);                             // trailing header text
  CHECK(line_of("N 1\n") == 1);                               // too few qubits
  CHECK(line_of("N 2\n0 1 0\nbroken\n") == 3);                // malformed row
  CHECK(line_of("N 2\n0 1 0 9\n") == 2);                      // extra column
  CHECK(line_of("N 2\n5 1 0\n") == 2);                        // index out of range
  CHECK(line_of("N 2\n0 1 0\n0 1 0\n") == 3);                 // duplicate index
  CHECK(line_of("N 2\n0 1 0\n1 0 0\n") == 3);                 // missing index 2
  CHECK(line_of("# only a comment\n") == 1);                  // no header at all
  CHECK(line_of("N 2\n0 nan 0\n1 0 0\n2 1 0\n") == 2);        // non-finite value
}

TEST_CASE("real formatting is exact, locale free and kills negative zero") {
  CHECK(io::format_real(-0.0) == io::format_real(0.0));
  CHECK(io::format_real(0.0).find('-') == std::string::npos);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    double x = std::ldexp(gaussian(rng), static_cast<int>(rng() % 41) - 20);
    CHECK(std::stod(io::format_real(x)) == x);
  }
}

TEST_CASE("report documents are plain deterministic text") {
  io::ReportDocument rep;
  rep.section("alpha");
  rep.put("x", 1.5);
  rep.put("name", std::string("value"));
  rep.put_bool("flag", false);
  rep.section("beta");
  rep.put("k", 3);
  CHECK(rep.str() ==
        "[alpha]\n"
        "x = 1.5000000000000000e+00\n"
        "name = value\n"
        "flag = false\n"
        "\n"
        "[beta]\n"
        "k = 3\n");
}
