#pragma once

#include <stdexcept>
#include <string>

namespace gradsurg {

// Base class for every failure the library raises. Messages carry enough
// context to identify the offending input.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A vector with norm too small to normalize.
struct ZeroVector : Error {
  using Error::Error;
};

// Operands of unequal dimension.
struct DimensionMismatch : Error {
  using Error::Error;
};

// A similarity outside [-1, 1] beyond floating-point slack.
struct OutOfRange : Error {
  using Error::Error;
};

// A coincident pair where a displacement direction is required.
struct Degenerate : Error {
  using Error::Error;
};

// A triplet whose direction set cannot be normalized.
struct DegenerateTriplet : Error {
  using Error::Error;
};

// Relative statistics whose form does not match the requested pair weight.
struct MismatchedStats : Error {
  using Error::Error;
};

// Not enough classes or samples to satisfy a batch spec.
struct InsufficientData : Error {
  using Error::Error;
};

// A batch with a singleton class or a single class overall.
struct DegenerateBatch : Error {
  using Error::Error;
};

// A retrieval cutoff K that is not smaller than the gallery size.
struct KTooLarge : Error {
  using Error::Error;
};

// A non-finite gradient entry; the training step is aborted.
struct NonFiniteGradient : Error {
  using Error::Error;
};

// Malformed configuration text.
struct ParseError : Error {
  ParseError(int line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
  int line;
};

// Well-formed configuration violating an invariant.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace gradsurg
