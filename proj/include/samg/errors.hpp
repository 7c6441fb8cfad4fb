#pragma once

#include <stdexcept>
#include <string>

namespace samg {

// Malformed model or policy text. Messages carry a line number for syntax
// problems and the offending state/action/agent names for semantic ones.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// An in-memory object violates a structural invariant (bad dimensions,
// unknown builtin name, probabilities off the simplex, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration would exceed its documented size cap.
struct SizeGuardError : std::runtime_error {
  explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace samg
