#pragma once

// Limit profile for a general strictly increasing potential V.
//
// On (R0, R) the density solves -delta Lap n = V(R) - V(r) - lambda with
// n(R) = n'(R) = 0, whose solution is expressed through
// H(z) = int_z^R u V(u) du.  Writing tau = (R^2 - R0^2)/R^2, the saturation
// conditions n(R0) = 1, n'(R0) = 0 reduce to the scalar equation
//
//   F(tau) = H(R0) (log(1-tau)/tau + 1) + 2 int_{R0}^R H(z)/z dz = 2 delta,
//
// after which lambda = V(R) - 2 H(R0) / (R^2 tau).

#include <cstddef>
#include <string>
#include <vector>

#include "chradial/limit.hpp"
#include "chradial/model.hpp"

namespace chradial {

/// H(z) tabulated on a uniform z-grid over [0, R] and evaluated by cubic
/// Hermite interpolation with the exact derivative H'(z) = -z V(z).  The
/// quadratic potential bypasses the table.
class HCache {
 public:
  HCache(double R, PotentialSpec V, std::size_t intervals = 2048);

  double operator()(double z) const;
  /// int_r^R H(z)/z dz for 0 < r <= R.  Whole cells come from a prefix table,
  /// the partial cell from Gauss-Legendre in log z.
  double over_z_integral(double r) const;

  double R() const noexcept { return R_; }
  const PotentialSpec& potential() const noexcept { return V_; }

 private:
  std::size_t cell_of(double z) const;
  double cell_end(std::size_t k) const;
  double log_integral(double a, double b) const;

  double R_;
  PotentialSpec V_;
  double dz_ = 0.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::vector<double> tail_;  // tail_[k] = int_{z_k}^R H(z)/z dz, k >= 1
};

/// Solver for one (R, V); reuses the H table across all tau and delta.
class GeneralLimitSolver {
 public:
  GeneralLimitSolver(double R, PotentialSpec V);

  double R() const noexcept { return cache_.R(); }
  const PotentialSpec& potential() const noexcept { return cache_.potential(); }
  double H(double z) const { return cache_(z); }

  double H_over_z_integral(double r) const { return cache_.over_z_integral(r); }

  ValueSlope solution(double r, double lambda, double delta) const;
  double F(double tau) const;
  double F_derivative(double tau) const;
  double solve_tau(double delta) const;

 private:
  HCache cache_;
};

struct GeneralLimitProfile {
  double R = 0.0;
  double tau = 0.0;
  double R0 = 0.0;
  double lambda = 0.0;
  double jump_asymptote = 0.0;
  double width_asymptote = 0.0;
  std::string potential;
};

ValueSlope solution_n_general(double r, double R, double lambda, double delta, const PotentialSpec& V);

/// F(tau) for tau in [0, 1); F(0) = 0.
double F_tau(double tau, double R, const PotentialSpec& V);

/// Bisection on (0, 1 - 1e-12) with a Newton polish.  Throws
/// SolverError(infeasible) if 2 delta lies outside the range of F.
double solve_tau(double R, double delta, const PotentialSpec& V);

GeneralLimitProfile lambda_general(double R, double delta, const PotentialSpec& V);

struct JumpAsymptote {
  double jump;   // (12^{1/3}/2) delta^{1/3} V'(R)^{2/3}
  double width;  // R^2 - R0^2 ~ 2 12^{1/3} delta^{1/3} R / V'(R)^{1/3}
};
JumpAsymptote jump_general_asymptote(double R, double delta, const PotentialSpec& V);

/// Named potentials shipped for testing: "r^2", "r^2-quadrature" (same V
/// through the generic quadrature path), "r^4", "exp(r)-1".
PotentialSpec test_potential(const std::string& name, double r_probe_max = 10.0);
std::vector<std::string> test_potential_names();

struct GeneralSweepRow {
  double delta;
  double tau;
  double R0;
  double lambda;
  double lambda_asymptote;
  double ratio;
};

std::vector<GeneralSweepRow> general_delta_sweep(double R, const std::vector<double>& deltas,
                                                 const PotentialSpec& V);

}  // namespace chradial
