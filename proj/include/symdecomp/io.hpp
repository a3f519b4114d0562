#pragma once

#include <string>
#include <vector>

#include "symdecomp/symstate.hpp"

namespace symdecomp::io {

class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

// Text format: optional '#' comment lines, a header "N <n>", then n+1 lines
// "k re im" covering every k exactly once. The state is normalized on read;
// if the input norm deviated from 1 by more than 1e-12, *warning is set.
SymmetricState parse_state_file(const std::string& text,
                                std::string* warning = nullptr);

std::string write_state_file(const SymmetricState& s,
                             const std::string& comment = "");

// Full precision (17 significant digits), locale-independent.
std::string format_real(double x);
std::string format_complex(cplx z); // "re im"

// Deterministic "[section]" / "key = value" report emitter.
class ReportDocument {
public:
  void section(const std::string& name);
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, double value);
  void put(const std::string& key, cplx value);
  void put(const std::string& key, int value);
  void put_bool(const std::string& key, bool value);
  std::string str() const { return text_; }

private:
  std::string text_;
  bool first_section_ = true;
};

} // namespace symdecomp::io
