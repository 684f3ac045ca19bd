#pragma once

#include <stdexcept>
#include <string>

namespace chradial {

/// Bad input to a public operation (violated precondition).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to produce a result.  The kind names the
/// failure mode so callers (and the CLI) can report it without parsing text.
class SolverError : public std::runtime_error {
 public:
  enum class Kind {
    no_convergence,
    singular_jacobian,
    bracket_failure,
    domain_too_small,
    infeasible,
    blow_up,
    stability_guard,
    non_finite,
  };

  SolverError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(SolverError::Kind kind) noexcept;

}  // namespace chradial
