#pragma once

#include <stdexcept>
#include <string>

namespace qlearn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value type was constructed with data that breaks its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a function (t outside [0, tau], E < 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Negative eigenvalue beyond the support cutoff.
class NegativityError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: basis sizes, quadrature orders, missing bound states, JSON content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock basis cannot hold the state to the requested tolerance.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was not met (oracle step too coarse, block mismatch, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// E_tau <= 0: the speed limit time is meaningless.
class DegenerateDynamicsError : public Error {
 public:
  using Error::Error;
};

/// N(t) <= 0: the drive is too strong for the first-order expansion.
class PerturbationRangeError : public Error {
 public:
  using Error::Error;
};

/// Input the engine deliberately does not handle (mixed initial states).
class UnsupportedInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlearn
