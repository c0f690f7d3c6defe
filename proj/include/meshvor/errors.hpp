#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshvor {

/// Raised when a construction needs non-degenerate geometry (collinear
/// triangle, non-convex box, coincident points).
class DegenerateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a precondition on a query or mutation is violated (point
/// outside the hull, flip on a hull edge, wrong vertex degree).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DuplicatePointError : public DegenerateError {
 public:
  DuplicatePointError(const std::string& what, std::size_t index)
      : DegenerateError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A post-condition of the kinetic phase failed. Indicates a predicate or
/// scheduling bug, never bad input.
class KineticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A built-in check failed (structural validation or an oracle comparison).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace meshvor
