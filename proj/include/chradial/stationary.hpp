#pragma once

// Finite-stiffness stationary states with compact support:
//
//   max(0,n)^gamma - (delta/r) n' - delta n'' = R^2 - r^2 - lambda  on (0, R),
//   n'(0) = 0,  n(R) = n'(R) = 0.
//
// The ODE is discretized in the squared radius s = r^2, where the radial
// Laplacian becomes 4 (s n_s)_s and the origin is a regular point.  Central
// differences on a uniform s-mesh are second order and reproduce the
// pressure-free solution (quadratic in s) exactly.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chradial/grid.hpp"
#include "chradial/model.hpp"

namespace chradial {

struct StationaryOptions {
  std::size_t n_nodes = 1000;
  int max_newton = 100;
  int max_halvings = 30;
};

/// Result of one Newton solve at a fixed multiplier.
struct BvpSolution {
  double R = 0.0;
  double lambda = 0.0;
  std::vector<double> s;  // squared-radius nodes, s_j = j R^2/(N-1)
  std::vector<double> n;  // nodal density, n.back() == 0
  double end_slope = 0.0;  // n'(R) in r, one-sided second order
  double residual = 0.0;   // max |residual| at exit
  int newton_iters = 0;

  /// Cubic interpolation in s; zero for r >= R.
  double value_at(double r) const;
};

BvpSolution solve_bvp_given_lambda(double R, double lambda, const Params& p,
                                   std::size_t n_nodes,
                                   std::span<const double> initial_guess = {},
                                   const StationaryOptions& opts = {});

struct LambdaSolution {
  double lambda = 0.0;
  BvpSolution bvp;
  int bisect_iters = 0;
  double slope_at_zero = 0.0;      // n'(R; lambda = 0)
  double slope_at_R_squared = 0.0; // n'(R; lambda = R^2)
};

/// Bisection on lambda in [0, R^2] against the sign of n'(R; lambda).
LambdaSolution find_lambda(double R, const Params& p, std::size_t n_nodes,
                           const StationaryOptions& opts = {});

struct StationaryProfile {
  double R = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double mass = 0.0;
  double residual_neumann = 0.0;
  int newton_iters = 0;
  int bisect_iters = 0;
  bool monotonicity_anomaly = false;
  BvpSolution solution;
  DensityField n;  // resampled on a uniform r-grid over [0, R]

  double value_at(double r) const { return solution.value_at(r); }
};

StationaryProfile make_profile(const LambdaSolution& sol, const Params& p);

/// int_0^R r n dr of the solver-mesh values (trapezoid in s).
double mass_of(const BvpSolution& sol);
double mass_of(const StationaryProfile& profile);

struct MassScanEntry {
  double R;
  double mass;
};

/// Inverts R -> mass(find_lambda(R)) for the target mass m with a bracketed
/// solver, seeded from R ~ sqrt(2m).  Throws SolverError(bracket_failure) with
/// the scan table, or SolverError(domain_too_small) if the bracket reaches r_b.
StationaryProfile find_radius_for_mass(double m, const Params& p, const StationaryOptions& opts = {});

/// Zero-padded profile on a uniform grid over [0, r_b].
DensityField extend_to_domain(const StationaryProfile& profile, double r_b, std::size_t n_nodes);

/// Same as extend_to_domain but sampled onto an existing grid.
DensityField sample_on(const StationaryProfile& profile, const RadialGrid& grid);

}  // namespace chradial
