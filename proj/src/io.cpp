#include "symdecomp/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace symdecomp::io {

std::string format_real(double x) {
  if (x == 0.0) x = 0.0; // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string format_complex(cplx z) {
  return format_real(z.real()) + " " + format_real(z.imag());
}

void ReportDocument::section(const std::string& name) {
  if (!first_section_) text_ += "\n";
  first_section_ = false;
  text_ += "[" + name + "]\n";
}

void ReportDocument::put(const std::string& key, const std::string& value) {
  text_ += key + " = " + value + "\n";
}

void ReportDocument::put(const std::string& key, double value) {
  put(key, format_real(value));
}

void ReportDocument::put(const std::string& key, cplx value) {
  put(key, format_complex(value));
}

void ReportDocument::put(const std::string& key, int value) {
  put(key, std::to_string(value));
}

void ReportDocument::put_bool(const std::string& key, bool value) {
  put(key, std::string(value ? "true" : "false"));
}

SymmetricState parse_state_file(const std::string& text, std::string* warning) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<cplx> c;
  std::vector<bool> seen;

  auto strip = [](std::string s) {
    size_t h = s.find('#');
    if (h != std::string::npos) s.erase(h);
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string body = strip(line);
    if (body.empty()) continue;
    std::istringstream ls(body);
    if (n < 0) {
      std::string tag;
      ls >> tag;
      if (tag != "N") throw ParseError(lineno, "expected header 'N <count>'");
      if (!(ls >> n)) throw ParseError(lineno, "unreadable qubit count");
      std::string rest;
      if (ls >> rest) throw ParseError(lineno, "trailing text after qubit count");
      if (n < 2) throw ParseError(lineno, "qubit count must be at least 2");
      c.assign(static_cast<size_t>(n) + 1, cplx(0.0));
      seen.assign(static_cast<size_t>(n) + 1, false);
      continue;
    }
    int k;
    double re, im;
    if (!(ls >> k >> re >> im))
      throw ParseError(lineno, "expected 'k re im'");
    std::string rest;
    if (ls >> rest) throw ParseError(lineno, "trailing text after amplitude");
    if (k < 0 || k > n) throw ParseError(lineno, "index out of range");
    if (seen[static_cast<size_t>(k)]) throw ParseError(lineno, "duplicate index");
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ParseError(lineno, "non-finite amplitude");
    seen[static_cast<size_t>(k)] = true;
    c[static_cast<size_t>(k)] = cplx(re, im);
  }
  if (n < 0) throw ParseError(lineno, "missing 'N <count>' header");
  for (int k = 0; k <= n; ++k)
    if (!seen[static_cast<size_t>(k)])
      throw ParseError(lineno, "missing amplitude for index " + std::to_string(k));

  SymmetricState raw(n, c); // validates non-zero
  double nrm = raw.norm();
  if (warning && std::abs(nrm - 1.0) > 1e-12)
    *warning = "input norm " + format_real(nrm) + " differs from 1; renormalized";
  return raw.normalized();
}

std::string write_state_file(const SymmetricState& s, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "N " + std::to_string(s.n_qubits()) + "\n";
  for (int k = 0; k <= s.n_qubits(); ++k)
    out += std::to_string(k) + " " + format_complex(s[k]) + "\n";
  return out;
}

} // namespace symdecomp::io
