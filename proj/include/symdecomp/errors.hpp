#pragma once

#include <stdexcept>
#include <string>

namespace symdecomp {

// Failure categories that callers (and the CLI exit-code table) distinguish.
enum class Fault {
  NonGeneric,        // state violates the root-multiplicity bound, no expansion exists
  SolverFailure,     // numerics did not converge to the requested tolerance
  TieBreakUnstable,  // ordering convention cannot separate two terms
  InsufficientTerms, // expansion too short for the requested normal form
};

inline const char* fault_name(Fault f) {
  switch (f) {
    case Fault::NonGeneric: return "non-generic";
    case Fault::SolverFailure: return "solver-failure";
    case Fault::TieBreakUnstable: return "tie-break-unstable";
    case Fault::InsufficientTerms: return "insufficient-terms";
  }
  return "unknown";
}

class DecompositionError : public std::runtime_error {
public:
  DecompositionError(Fault fault, const std::string& what)
      : std::runtime_error(what), fault_(fault) {}

  Fault fault() const { return fault_; }

private:
  Fault fault_;
};

} // namespace symdecomp
