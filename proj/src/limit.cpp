#include "chradial/limit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "chradial/errors.hpp"

namespace chradial {

namespace {

// Below this the closed forms of f and f' lose too many digits to
// cancellation; the Taylor series converges quickly there.
constexpr double kSeriesCutoff = 0.3;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

ValueSlope reference_u(double r, double R, double lambda_u, double delta) {
  require_positive(R, "R");
  require_positive(delta, "delta");
  if (!(r > 0.0) || r > R) {
    std::ostringstream os;
    os << "reference_u: need 0 < r <= R, got r = " << r << ", R = " << R;
    throw InvalidArgument(os.str());
  }
  const double R2 = R * R;
  const double a = R2 - 2.0 * lambda_u;
  const double d2 = (R - r) * (R + r);  // R^2 - r^2 without cancellation
  const double log_ratio = std::log1p((r - R) / R);
  const double value = R2 / (4.0 * delta) * a * log_ratio + d2 * d2 / (16.0 * delta) +
                       a / (8.0 * delta) * d2;
  const double slope = d2 * (d2 - 2.0 * lambda_u) / (4.0 * delta * r);
  return {value, slope};
}

double f_xc(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw InvalidArgument("f_xc: x must lie in [0, 1)");
  if (x < kSeriesCutoff) {
    // sum_{k>=3} x^k / (k(k-1))
    double term = x * x * x;
    double sum = 0.0;
    for (int k = 3; k < 200; ++k) {
      const double t = term / (k * (k - 1.0));
      sum += t;
      if (t < 1e-18 * sum) break;
      term *= x;
    }
    return sum;
  }
  return (1.0 - x) * std::log1p(-x) - 0.5 * x * x + x;
}

double f_xc_derivative(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw InvalidArgument("f_xc_derivative: x must lie in [0, 1)");
  if (x < kSeriesCutoff) {
    double term = x * x;
    double sum = 0.0;
    for (int k = 2; k < 200; ++k) {
      const double t = term / k;
      sum += t;
      if (t < 1e-18 * sum) break;
      term *= x;
    }
    return sum;
  }
  return -std::log1p(-x) - x;
}

double solve_xc(double R, double delta) {
  require_positive(R, "R");
  require_positive(delta, "delta");
  const double R4 = R * R * R * R;
  if (!(16.0 * delta < R4)) {
    std::ostringstream os;
    os << "no saturation radius: need 16 delta < R^4 (delta = " << delta << ", R = " << R << ")";
    throw SolverError(SolverError::Kind::infeasible, os.str());
  }
  const double target = 8.0 * delta / R4;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f_xc(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const double fp = f_xc_derivative(x);
  if (fp > 0.0) {
    const double polished = x - (f_xc(x) - target) / fp;
    if (polished > lo && polished < hi) x = polished;
  }
  return x;
}

double mass_formula(double R, double delta) {
  const double x = solve_xc(R, delta);
  const double R2 = R * R;
  return R2 * R2 * R2 * x * x * x / (96.0 * delta);
}

double minimum_mass(double delta, MassFeasibility mode) {
  require_positive(delta, "delta");
  return mode == MassFeasibility::existence_bound ? 72.0 * std::sqrt(delta) : 2.0 / 3.0 * std::sqrt(delta);
}

double radius_for_mass(double m, double delta, MassFeasibility mode) {
  require_positive(m, "mass");
  const double m_min = minimum_mass(delta, mode);
  if (!(m > m_min)) {
    std::ostringstream os;
    os << "infeasible mass: m = " << m << " must exceed " << m_min
       << (mode == MassFeasibility::existence_bound ? " (72 sqrt(delta))" : " ((2/3) sqrt(delta))");
    throw SolverError(SolverError::Kind::infeasible, os.str());
  }
  const double R_min = std::pow(16.0 * delta, 0.25);
  auto g = [&](double R) { return mass_formula(R, delta) - m; };

  const double r_lead = std::sqrt(2.0 * m);
  double lo = std::max(0.9 * r_lead, R_min * (1.0 + 1e-12));
  double hi = std::max(1.5 * r_lead, 2.0 * R_min);
  // M(R) is strictly increasing on R > R_min; widen geometrically.
  for (int k = 0; k < 200 && g(lo) > 0.0; ++k) {
    lo = R_min + 0.5 * (lo - R_min);
  }
  for (int k = 0; k < 200 && g(hi) < 0.0; ++k) hi *= 2.0;
  if (g(lo) > 0.0 || g(hi) < 0.0) {
    throw SolverError(SolverError::Kind::bracket_failure, "radius_for_mass: could not bracket the mass");
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double R = 0.5 * (lo + hi);
  // dM/dR = (6 R^5 x^3 - 96 delta R x^2 / f'(x)) / (96 delta), using x'(R) f'(x) = -32 delta / R^5
  const double x = solve_xc(R, delta);
  const double fp = f_xc_derivative(x);
  const double R5 = std::pow(R, 5);
  const double dM = (6.0 * R5 * x * x * x - 96.0 * delta * R * x * x / fp) / (96.0 * delta);
  if (dM > 0.0) {
    const double polished = R - g(R) / dM;
    if (polished >= lo && polished <= hi) R = polished;
  }
  return R;
}

double IncompressibleProfile::density_at(double r) const {
  if (r <= R0) return 1.0;
  if (r >= R) return 0.0;
  return reference_u(r, R, lambda_c, delta).value;
}

double IncompressibleProfile::slope_at(double r) const {
  if (r <= R0 || r >= R) return 0.0;
  return reference_u(r, R, lambda_c, delta).slope;
}

double IncompressibleProfile::pressure_at(double r) const {
  if (r <= R0) return (R - r) * (R + r) - lambda_c;
  return 0.0;
}

IncompressibleProfile profile_for_radius(double R, double delta, double r_out, std::size_t n_nodes) {
  require_positive(R, "R");
  if (!(r_out >= R)) throw InvalidArgument("r_out must be at least the support radius R");
  const RadialGrid grid = build_grid(r_out, n_nodes);
  IncompressibleProfile prof{.R = R,
                             .delta = delta,
                             .n_inc = DensityField::constant(grid, 0.0),
                             .p_inc = DensityField::constant(grid, 0.0)};
  prof.x_c = solve_xc(R, delta);
  prof.lambda_c = 0.5 * R * R * prof.x_c;
  prof.R0 = R * std::sqrt(1.0 - prof.x_c);
  prof.jump = prof.lambda_c;
  prof.mass = std::pow(R, 6) * std::pow(prof.x_c, 3) / (96.0 * delta);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    prof.n_inc[i] = prof.density_at(r);
    prof.p_inc[i] = prof.pressure_at(r);
  }
  return prof;
}

IncompressibleProfile build_profile(double m, double delta, double r_out, std::size_t n_nodes,
                                    MassFeasibility mode) {
  const double R = radius_for_mass(m, delta, mode);
  return profile_for_radius(R, delta, std::max(r_out, R), n_nodes);
}

double jump_asymptotic(double R, double delta) {
  require_positive(R, "R");
  require_positive(delta, "delta");
  return std::cbrt(6.0 * delta) * std::cbrt(R * R);
}

GammaSweepReport gamma_sweep(double m, double delta, const std::vector<double>& gammas,
                             std::size_t n_nodes, const Params& base, unsigned threads) {
  if (n_nodes < 64) throw InvalidArgument("gamma_sweep: need at least 64 nodes");
  for (std::size_t k = 1; k < gammas.size(); ++k) {
    if (!(gammas[k] > gammas[k - 1])) throw InvalidArgument("gamma_sweep: gammas must be increasing");
  }
  const double R_lim = radius_for_mass(m, delta);
  GammaSweepReport report{profile_for_radius(R_lim, delta, R_lim, n_nodes), {}};
  report.rows.resize(gammas.size());

  auto run_one = [&](std::size_t k) {
    SweepRow& row = report.rows[k];
    const IncompressibleProfile& lim = report.limit;
    row.gamma = gammas[k];
    row.lambda_c = lim.lambda_c;
    row.jump_asymptote = jump_asymptotic(lim.R, delta);
    try {
      Params p = base;
      p.gamma = gammas[k];
      p.delta = delta;
      p.mass = m;
      p.potential = PotentialSpec::quadratic();
      p.validate();
      StationaryOptions opts;
      opts.n_nodes = n_nodes;
      const StationaryProfile prof = find_radius_for_mass(m, p, opts);
      row.R_gamma = prof.R;
      row.R_err = std::abs(prof.R - lim.R);
      // common grid covering both supports
      const RadialGrid grid = build_grid(std::max(prof.R, lim.R), 4 * n_nodes);
      double err = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        err = std::max(err, std::abs(prof.value_at(r) - lim.density_at(r)));
      }
      row.sup_err = err;
      row.p_at_R0 = PressureLaw(p.gamma)(prof.value_at(lim.R0));
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(gammas.size(), 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < gammas.size(); ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < gammas.size(); k = next++) run_one(k);
      });
    }
  }
  return report;
}

}  // namespace chradial
