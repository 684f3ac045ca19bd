#include "chradial/errors.hpp"

namespace chradial {

const char* to_string(SolverError::Kind kind) noexcept {
  switch (kind) {
    case SolverError::Kind::no_convergence: return "no-convergence";
    case SolverError::Kind::singular_jacobian: return "singular-jacobian";
    case SolverError::Kind::bracket_failure: return "bracket-failure";
    case SolverError::Kind::domain_too_small: return "domain-too-small";
    case SolverError::Kind::infeasible: return "infeasible";
    case SolverError::Kind::blow_up: return "blow-up";
    case SolverError::Kind::stability_guard: return "stability-guard";
    case SolverError::Kind::non_finite: return "non-finite";
  }
  return "unknown";
}

}  // namespace chradial
