#include "chradial/stationary.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "chradial/errors.hpp"

namespace chradial {

namespace {

double cubic_in_s(std::span<const double> values, double k, double s) {
  const std::size_t n = values.size();
  const double x = s / k;
  long j0 = static_cast<long>(std::floor(x)) - 1;
  j0 = std::clamp<long>(j0, 0, static_cast<long>(n) - 4);
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (x - static_cast<double>(j0 + b)) / static_cast<double>(a - b);
    }
    result += w * values[static_cast<std::size_t>(j0 + a)];
  }
  return result;
}

// Guess for the Newton iteration: the saturated core value where the
// right-hand side is positive, zero elsewhere.
std::vector<double> core_guess(double R, double lambda, double gamma, std::size_t n_nodes) {
  const double k = R * R / static_cast<double>(n_nodes - 1);
  std::vector<double> g(n_nodes, 0.0);
  for (std::size_t j = 0; j + 1 < n_nodes; ++j) {
    const double rhs = R * R - static_cast<double>(j) * k - lambda;
    g[j] = rhs > 0.0 ? std::pow(rhs, 1.0 / gamma) : 0.0;
  }
  return g;
}

class BvpSystem {
 public:
  BvpSystem(double R, double lambda, const Params& p, std::size_t n_nodes)
      : R_(R), lambda_(lambda), c_(4.0 * p.delta), law_(p.gamma), n_(n_nodes),
        k_(R * R / static_cast<double>(n_nodes - 1)) {}

  std::size_t unknowns() const { return n_ - 1; }
  double spacing() const { return k_; }

  // Residual in pressure units; u holds all N nodal values with u.back() == 0.
  void residual(std::span<const double> u, std::span<double> f) const {
    const std::size_t m = unknowns();
    f[0] = law_(u[0]) - c_ * (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * k_) - (R_ * R_ - lambda_);
    for (std::size_t j = 1; j < m; ++j) {
      const double jd = static_cast<double>(j);
      const double div = ((jd + 0.5) * (u[j + 1] - u[j]) - (jd - 0.5) * (u[j] - u[j - 1])) / k_;
      f[j] = law_(u[j]) - c_ * div - (R_ * R_ - jd * k_ - lambda_);
    }
  }

  // Solves J d = rhs in place (rhs -> d).  Row 0 carries an extra entry in
  // column 2 from the one-sided stencil; it is eliminated against row 1.
  void solve_newton(std::span<const double> u, std::span<double> rhs) {
    const std::size_t m = unknowns();
    lower_.assign(m, 0.0);
    diag_.assign(m, 0.0);
    upper_.assign(m, 0.0);
    diag_[0] = law_.derivative(u[0]) + 1.5 * c_ / k_;
    upper_[0] = -2.0 * c_ / k_;
    const double extra = 0.5 * c_ / k_;
    for (std::size_t j = 1; j < m; ++j) {
      const double jd = static_cast<double>(j);
      lower_[j] = -c_ * (jd - 0.5) / k_;
      diag_[j] = law_.derivative(u[j]) + c_ * 2.0 * jd / k_;
      upper_[j] = j + 1 < m ? -c_ * (jd + 0.5) / k_ : 0.0;
    }
    const double factor = extra / upper_[1];
    diag_[0] -= factor * lower_[1];
    upper_[0] -= factor * diag_[1];
    rhs[0] -= factor * rhs[1];

    // Thomas algorithm
    for (std::size_t j = 1; j < m; ++j) {
      if (std::abs(diag_[j - 1]) < 1e-300) {
        throw SolverError(SolverError::Kind::singular_jacobian,
                          "stationary BVP: zero pivot in Newton system");
      }
      const double w = lower_[j] / diag_[j - 1];
      diag_[j] -= w * upper_[j - 1];
      rhs[j] -= w * rhs[j - 1];
    }
    if (std::abs(diag_[m - 1]) < 1e-300) {
      throw SolverError(SolverError::Kind::singular_jacobian, "stationary BVP: zero pivot in Newton system");
    }
    rhs[m - 1] /= diag_[m - 1];
    for (std::size_t j = m - 1; j-- > 0;) rhs[j] = (rhs[j] - upper_[j] * rhs[j + 1]) / diag_[j];
  }

 private:
  double R_;
  double lambda_;
  double c_;
  PressureLaw law_;
  std::size_t n_;
  double k_;
  std::vector<double> lower_, diag_, upper_;
};

double sum_squares(std::span<const double> f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return s;
}

double max_abs(std::span<const double> f) {
  double s = 0.0;
  for (double x : f) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

double BvpSolution::value_at(double r) const {
  const double rs = r * r;
  if (n.empty() || rs >= R * R) return 0.0;
  const double k = R * R / static_cast<double>(n.size() - 1);
  return cubic_in_s(n, k, rs);
}

BvpSolution solve_bvp_given_lambda(double R, double lambda, const Params& p, std::size_t n_nodes,
                                   std::span<const double> initial_guess,
                                   const StationaryOptions& opts) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("stationary BVP: R must be positive");
  if (n_nodes < 64) throw InvalidArgument("stationary BVP: need at least 64 nodes");
  if (!std::isfinite(lambda)) throw InvalidArgument("stationary BVP: lambda must be finite");

  BvpSystem sys(R, lambda, p, n_nodes);
  const std::size_t m = sys.unknowns();

  std::vector<double> u;
  if (initial_guess.size() == n_nodes) {
    u.assign(initial_guess.begin(), initial_guess.end());
  } else {
    u = core_guess(R, lambda, p.gamma, n_nodes);
  }
  u.back() = 0.0;

  std::vector<double> f(m), d(m), trial(n_nodes), f_trial(m);
  sys.residual(u, f);
  double merit = sum_squares(f);
  double res = max_abs(f);
  int iter = 0;
  while (!(res < p.tol_newton)) {
    if (iter >= opts.max_newton) {
      std::ostringstream os;
      os << "stationary BVP (R = " << R << ", lambda = " << lambda << "): no convergence after "
         << opts.max_newton << " Newton steps, last residual " << res;
      throw SolverError(SolverError::Kind::no_convergence, os.str());
    }
    ++iter;
    for (std::size_t j = 0; j < m; ++j) d[j] = -f[j];
    sys.solve_newton(u, d);
    // Stagnation at rounding level counts as converged: on fine meshes the
    // residual floor (~eps * 4 delta / k^2 * |n|) can sit near tol_newton.
    if (max_abs(d) <= 1e-13 * (1.0 + max_abs(u))) break;

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = u[j] + t * d[j];
      trial.back() = 0.0;
      sys.residual(trial, f_trial);
      const double merit_trial = sum_squares(f_trial);
      if (std::isfinite(merit_trial) && merit_trial < merit) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "stationary BVP (R = " << R << ", lambda = " << lambda
         << "): line search failed, residual " << res;
      throw SolverError(SolverError::Kind::no_convergence, os.str());
    }
    u.swap(trial);
    f.swap(f_trial);
    merit = sum_squares(f);
    res = max_abs(f);
  }
  if (iter > 0 || res > 0.0) {
    // one polishing step pushes the nodal error to rounding level, which the
    // end-slope extraction (scaled by R/k) needs
    for (std::size_t j = 0; j < m; ++j) d[j] = -f[j];
    sys.solve_newton(u, d);
    for (std::size_t j = 0; j < m; ++j) trial[j] = u[j] + d[j];
    trial.back() = 0.0;
    sys.residual(trial, f_trial);
    if (std::isfinite(sum_squares(f_trial)) && max_abs(f_trial) <= std::max(res, p.tol_newton)) {
      u.swap(trial);
      res = max_abs(f_trial);
    }
  }

  BvpSolution sol;
  sol.R = R;
  sol.lambda = lambda;
  sol.s.resize(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) sol.s[j] = static_cast<double>(j) * sys.spacing();
  sol.s.back() = R * R;
  sol.n = std::move(u);
  const double k = sys.spacing();
  // n_r = 2 r n_s, with n_s(R) from the one-sided three-point stencil
  sol.end_slope = R * (-4.0 * sol.n[n_nodes - 2] + sol.n[n_nodes - 3]) / k;
  sol.residual = res;
  sol.newton_iters = iter;
  return sol;
}

LambdaSolution find_lambda(double R, const Params& p, std::size_t n_nodes, const StationaryOptions& opts) {
  if (!(R > 0.0)) throw InvalidArgument("find_lambda: R must be positive");
  const double R2 = R * R;

  LambdaSolution out;
  BvpSolution lo_sol = solve_bvp_given_lambda(R, 0.0, p, n_nodes, {}, opts);
  BvpSolution hi_sol = solve_bvp_given_lambda(R, R2, p, n_nodes, {}, opts);
  out.slope_at_zero = lo_sol.end_slope;
  out.slope_at_R_squared = hi_sol.end_slope;
  if (!(lo_sol.end_slope < 0.0 && hi_sol.end_slope > 0.0)) {
    std::ostringstream os;
    os << "find_lambda (R = " << R << "): endpoint slopes n'(R;0) = " << lo_sol.end_slope
       << ", n'(R;R^2) = " << hi_sol.end_slope << " are not (-,+); mesh too coarse?";
    throw SolverError(SolverError::Kind::bracket_failure, os.str());
  }

  double lo = 0.0;
  double hi = R2;
  double slope_lo = lo_sol.end_slope;
  double slope_hi = hi_sol.end_slope;
  // warm start from the pressure-carrying side
  std::vector<double> guess = lo_sol.n;
  int iters = 0;
  const double slope_tol = 10.0 * p.tol_newton;
  BvpSolution best = lo_sol;

  while (hi - lo >= p.tol_root * R2 && iters < 200) {
    ++iters;
    const double mid = 0.5 * (lo + hi);
    BvpSolution sol = solve_bvp_given_lambda(R, mid, p, n_nodes, guess, opts);
    guess = sol.n;
    if (sol.end_slope < 0.0) {
      lo = mid;
      slope_lo = sol.end_slope;
    } else {
      hi = mid;
      slope_hi = sol.end_slope;
    }
    best = std::move(sol);
    if (std::abs(best.end_slope) < slope_tol && hi - lo < 1e3 * p.tol_root * R2) break;
  }

  // secant polish inside the final bracket
  for (int polish = 0; polish < 8 && !(std::abs(best.end_slope) < slope_tol); ++polish) {
    double lam = lo - slope_lo * (hi - lo) / (slope_hi - slope_lo);
    if (!(lam > lo && lam < hi)) lam = 0.5 * (lo + hi);
    BvpSolution sol = solve_bvp_given_lambda(R, lam, p, n_nodes, best.n, opts);
    if (sol.end_slope < 0.0) {
      lo = lam;
      slope_lo = sol.end_slope;
    } else {
      hi = lam;
      slope_hi = sol.end_slope;
    }
    best = std::move(sol);
  }
  if (!(std::abs(best.end_slope) < slope_tol)) {
    std::ostringstream os;
    os << "find_lambda (R = " << R << "): |n'(R)| = " << std::abs(best.end_slope)
       << " after bisection to bracket " << (hi - lo);
    throw SolverError(SolverError::Kind::no_convergence, os.str());
  }
  out.lambda = best.lambda;
  out.bvp = std::move(best);
  out.bisect_iters = iters;
  return out;
}

double mass_of(const BvpSolution& sol) {
  // int_0^R r n dr = (1/2) int_0^{R^2} n ds
  const std::size_t n = sol.n.size();
  if (n < 2) return 0.0;
  const double k = sol.R * sol.R / static_cast<double>(n - 1);
  double sum = 0.5 * (sol.n.front() + sol.n.back());
  for (std::size_t j = 1; j + 1 < n; ++j) sum += sol.n[j];
  return 0.5 * k * sum;
}

double mass_of(const StationaryProfile& profile) { return mass_of(profile.solution); }

StationaryProfile make_profile(const LambdaSolution& sol, const Params& p) {
  const std::size_t n_nodes = sol.bvp.n.size();
  RadialGrid grid(sol.bvp.R, n_nodes);
  std::vector<double> values(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) values[i] = sol.bvp.value_at(grid.node(i));
  StationaryProfile prof{.R = sol.bvp.R,
                         .lambda = sol.lambda,
                         .gamma = p.gamma,
                         .delta = p.delta,
                         .mass = mass_of(sol.bvp),
                         .residual_neumann = std::abs(sol.bvp.end_slope),
                         .newton_iters = sol.bvp.newton_iters,
                         .bisect_iters = sol.bisect_iters,
                         .monotonicity_anomaly = false,
                         .solution = sol.bvp,
                         .n = DensityField(grid, std::move(values))};
  return prof;
}

StationaryProfile find_radius_for_mass(double m, const Params& p, const StationaryOptions& opts) {
  if (!(m > 0.0)) throw InvalidArgument("find_radius_for_mass: mass must be positive");
  std::vector<MassScanEntry> scan;
  std::optional<LambdaSolution> last;

  auto mass_at = [&](double R) {
    LambdaSolution sol = find_lambda(R, p, opts.n_nodes, opts);
    const double mass = mass_of(sol.bvp);
    scan.push_back({R, mass});
    last = std::move(sol);
    return mass - m;
  };
  auto scan_table = [&] {
    std::ostringstream os;
    auto sorted = scan;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.R < b.R; });
    for (const auto& e : sorted) os << "\n  R = " << e.R << "  mass = " << e.mass;
    return os.str();
  };

  const double r_cap = p.r_b;
  double lo = 0.5 * std::sqrt(2.0 * m);
  double hi = std::min(2.0 * std::sqrt(2.0 * m), r_cap);
  if (!(lo < hi)) {
    throw SolverError(SolverError::Kind::domain_too_small,
                      "find_radius_for_mass: r_b is below the initial bracket");
  }
  double g_lo = mass_at(lo);
  for (int k = 0; g_lo > 0.0 && k < 40; ++k) {
    hi = lo;
    lo *= 0.5;
    g_lo = mass_at(lo);
  }
  double g_hi = mass_at(hi);
  while (g_hi < 0.0) {
    if (hi >= r_cap) {
      throw SolverError(SolverError::Kind::domain_too_small,
                        "find_radius_for_mass: mass not reached before r_b" + scan_table());
    }
    lo = hi;
    g_lo = g_hi;
    hi = std::min(2.0 * hi, r_cap);
    g_hi = mass_at(hi);
  }
  if (!(g_lo <= 0.0 && g_hi >= 0.0)) {
    throw SolverError(SolverError::Kind::bracket_failure,
                      "find_radius_for_mass: no sign change in bracket" + scan_table());
  }

  const double mass_tol = 1e-8 * m;
  auto solve_in = [&](double a, double b, double ga, double gb) {
    std::uintmax_t max_iter = 100;
    auto done = [&](double x0, double x1) {
      return std::abs(x1 - x0) <= 1e-14 * std::max(std::abs(x0), std::abs(x1)) ||
             (last && std::abs(scan.back().mass - m) < mass_tol);
    };
    auto g = [&](double R) { return mass_at(R); };
    if (ga == 0.0) return std::pair<double, double>{a, a};
    if (gb == 0.0) return std::pair<double, double>{b, b};
    return boost::math::tools::toms748_solve(g, a, b, ga, gb, done, max_iter);
  };
  solve_in(lo, hi, g_lo, g_hi);

  bool anomaly = false;
  {
    auto sorted = scan;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.R < b.R; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].mass < sorted[i - 1].mass) anomaly = true;
    }
  }
  if (anomaly) {
    // fall back to a scan for the first sign change, then refine locally
    const int n_scan = 24;
    double prev_R = lo;
    double prev_g = mass_at(lo);
    bool found = false;
    for (int k = 1; k <= n_scan && !found; ++k) {
      const double R = lo + (hi - lo) * k / n_scan;
      const double g = mass_at(R);
      if (prev_g <= 0.0 && g >= 0.0) {
        solve_in(prev_R, R, prev_g, g);
        found = true;
      }
      prev_R = R;
      prev_g = g;
    }
    if (!found) {
      throw SolverError(SolverError::Kind::bracket_failure,
                        "find_radius_for_mass: scan found no sign change" + scan_table());
    }
  }
  if (!last || !(std::abs(scan.back().mass - m) < mass_tol)) {
    std::ostringstream os;
    os << "find_radius_for_mass: achieved |mass - m| = "
       << (last ? std::abs(scan.back().mass - m) : m) << " above " << mass_tol << scan_table();
    throw SolverError(SolverError::Kind::no_convergence, os.str());
  }
  StationaryProfile prof = make_profile(*last, p);
  prof.monotonicity_anomaly = anomaly;
  return prof;
}

DensityField sample_on(const StationaryProfile& profile, const RadialGrid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = profile.value_at(grid.node(i));
  return DensityField(grid, std::move(values));
}

DensityField extend_to_domain(const StationaryProfile& profile, double r_b, std::size_t n_nodes) {
  if (profile.R > r_b) {
    std::ostringstream os;
    os << "extend_to_domain: support radius " << profile.R << " exceeds r_b = " << r_b;
    throw InvalidArgument(os.str());
  }
  return sample_on(profile, RadialGrid(r_b, n_nodes));
}

}  // namespace chradial
