#pragma once

#include <stdexcept>
#include <string>

namespace kurihara {

// Exit codes used by the command-line driver.
enum class ExitCode : int {
  ok = 0,
  input = 1,
  hypothesis = 2,
  inconclusive = 3,
  invariant = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed or out-of-domain input (bad prime, non-fundamental discriminant, parse errors).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::input, what) {}
};

/// A standing hypothesis of the theory is violated by the data.
class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what) : Error(ExitCode::hypothesis, what) {}
};

/// The finite search region does not determine the requested quantity.
class InconclusiveError : public Error {
 public:
  explicit InconclusiveError(const std::string& what) : Error(ExitCode::inconclusive, what) {}
};

/// t_n = 0: the quotient ring carries no p-adic information.
class ResolutionError : public InconclusiveError {
 public:
  explicit ResolutionError(const std::string& what) : InconclusiveError(what) {}
};

/// A numerical series did not reach the requested precision.
class PrecisionError : public InconclusiveError {
 public:
  explicit PrecisionError(const std::string& what) : InconclusiveError(what) {}
};

/// Hecke probes could not cut the eigenspace down to a line.
class AmbiguityError : public InputError {
 public:
  explicit AmbiguityError(const std::string& what) : InputError(what) {}
};

/// A synthetic localization length that no Selmer module can realise.
class ConstraintError : public InputError {
 public:
  explicit ConstraintError(const std::string& what) : InputError(what) {}
};

/// An internal identity that must hold failed.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ExitCode::invariant, what) {}
};

}  // namespace kurihara
