#pragma once

// Incompressible-limit profile for the quadratic potential V(r) = r^2.
//
// In the limit gamma -> infinity the density saturates at 1 on [0, R0] and
// decays on (R0, R) along the closed-form solution u_c of
//
//   -(delta/r) u' - delta u'' = R^2 - r^2 - lambda_c,
//   u(R) = u'(R) = 0,  u(R0) = 1,  u'(R0) = 0.
//
// With x_c in (0,1) solving f(x_c) = 8 delta / R^4 one has
// lambda_c = R^2 x_c / 2, R0 = R sqrt(1 - x_c), and the pressure jumps by
// R^2 - R0^2 - lambda_c = lambda_c across r = R0.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chradial/grid.hpp"
#include "chradial/model.hpp"
#include "chradial/stationary.hpp"

namespace chradial {

struct ValueSlope {
  double value;
  double slope;
};

/// Closed-form solution of -(delta/r)u' - delta u'' = R^2 - r^2 - lambda_u on
/// (0, R] with u(R) = u'(R) = 0.  Requires 0 < r <= R.
ValueSlope reference_u(double r, double R, double lambda_u, double delta);

/// f(x) = (1-x) ln(1-x) - x^2/2 + x on [0, 1).
double f_xc(double x);
/// f'(x) = -ln(1-x) - x.
double f_xc_derivative(double x);

/// Root of f(x) = 8 delta / R^4 in (0,1); throws SolverError(infeasible)
/// unless 16 delta < R^4.
double solve_xc(double R, double delta);

/// M(R) = R^6 x_c^3 / (96 delta), the mass of the limit profile of radius R.
double mass_formula(double R, double delta);

/// Which masses radius_for_mass accepts.
enum class MassFeasibility {
  /// The existence hypothesis m > 72 sqrt(delta).
  existence_bound,
  /// The whole branch R^4 > 16 delta, on which M(R) is strictly increasing
  /// from (2/3) sqrt(delta); i.e. m > (2/3) sqrt(delta).
  monotone_branch,
};

double minimum_mass(double delta, MassFeasibility mode);

/// Inverts mass_formula by bisection with a Newton polish.
double radius_for_mass(double m, double delta,
                       MassFeasibility mode = MassFeasibility::monotone_branch);

struct IncompressibleProfile {
  double R = 0.0;
  double R0 = 0.0;
  double lambda_c = 0.0;
  double x_c = 0.0;
  double jump = 0.0;
  double mass = 0.0;
  double delta = 0.0;
  DensityField n_inc;
  DensityField p_inc;

  double density_at(double r) const;
  double slope_at(double r) const;
  double pressure_at(double r) const;
};

/// Limit profile of the given support radius, sampled on [0, r_out].
IncompressibleProfile profile_for_radius(double R, double delta, double r_out, std::size_t n_nodes);

/// Limit profile carrying mass m.
IncompressibleProfile build_profile(double m, double delta, double r_out, std::size_t n_nodes,
                                    MassFeasibility mode = MassFeasibility::monotone_branch);

/// 6^{1/3} R^{2/3} delta^{1/3}, the small-delta asymptote of the jump.
double jump_asymptotic(double R, double delta);

struct SweepRow {
  double gamma = 0.0;
  double R_gamma = 0.0;
  double sup_err = 0.0;
  double R_err = 0.0;
  double p_at_R0 = 0.0;
  double lambda_c = 0.0;
  double jump_asymptote = 0.0;
  std::optional<std::string> error;
};

struct GammaSweepReport {
  IncompressibleProfile limit;
  std::vector<SweepRow> rows;
};

/// For each gamma: finite-gamma stationary state of mass m, compared with the
/// limit profile on a common grid.  Solver failures are recorded per row and
/// the sweep continues.  Rows are computed on up to `threads` workers.
GammaSweepReport gamma_sweep(double m, double delta, const std::vector<double>& gammas,
                             std::size_t n_nodes, const Params& base, unsigned threads = 1);

}  // namespace chradial
