#pragma once

#include <stdexcept>
#include <string>

namespace dnp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid constructor or operation parameter (p <= 1, lambda <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Argument outside the effective domain of a graph.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A computed or supplied pair (u, xi) is not on the graph within tolerance.
class MembershipError : public Error {
 public:
  using Error::Error;
};

// Fields on different meshes, or an operation's precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dnp
