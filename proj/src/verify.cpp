#include "chradial/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "chradial/errors.hpp"
#include "chradial/general_potential.hpp"
#include "chradial/limit.hpp"
#include "chradial/stationary.hpp"

namespace chradial {

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(4) << x;
  return os.str();
}

const std::vector<double>& delta_sweep() {
  static const std::vector<double> d{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  return d;
}

bool lower_bound_applies(double R, double delta) { return 6.0 * 6.0 * 6.0 * 6.0 * 8.0 * delta < std::pow(R, 4); }

// plain bisection on the closed form of f, independent of solve_xc's series
double xc_oracle(double R, double delta) {
  const double target = 8.0 * delta / std::pow(R, 4);
  double lo = 0.0;
  double hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double f = (1.0 - mid) * std::log1p(-mid) + mid - 0.5 * mid * mid;
    (f < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome ac1(const VerifyTolerances& tol) {
  Params p;
  p.gamma = 4.0;
  p.delta = 0.01;
  const double R = 1.0;
  const auto t0 = Clock::now();
  const BvpSolution sol = solve_bvp_given_lambda(R, R * R, p, 1000);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  double err = 0.0;
  for (std::size_t j = 0; j < sol.s.size(); ++j) {
    const double s = sol.s[j];
    err = std::max(err, std::abs(sol.n[j] - (s * s - R * R * R * R) / (16.0 * p.delta)));
  }
  return {err < tol.ac1_nodal && secs < tol.ac1_seconds,
          "max nodal error " + fmt(err) + ", n'(R) = " + fmt(sol.end_slope) + ", " + fmt(secs) + " s"};
}

Outcome ac2(const VerifyTolerances& tol) {
  Params p;
  p.gamma = 4.0;
  p.delta = 0.01;
  const auto t0 = Clock::now();
  const LambdaSolution sol = find_lambda(1.0, p, 1000);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = sol.lambda > 0.0 && sol.lambda < 1.0 && std::abs(sol.bvp.end_slope) < tol.ac2_slope &&
                  sol.slope_at_zero < 0.0 && sol.slope_at_R_squared > 0.0 && secs < tol.ac2_seconds;
  std::ostringstream os;
  os << "lambda* = " << std::setprecision(12) << sol.lambda << std::setprecision(4)
     << ", |n'(R)| = " << std::abs(sol.bvp.end_slope) << ", end slopes (" << sol.slope_at_zero << ", "
     << sol.slope_at_R_squared << "), " << secs << " s";
  return {ok, os.str()};
}

Outcome ac3(const VerifyTolerances& tol) {
  bool ok = true;
  double worst = 0.0;
  int bounded = 0;
  for (double d : delta_sweep()) {
    const double x = solve_xc(1.0, d);
    worst = std::max(worst, std::abs(x - xc_oracle(1.0, d)));
    const double c = std::cbrt(d);
    ok &= x <= 2.0 * std::cbrt(6.0) * c;
    if (lower_bound_applies(1.0, d)) {
      ok &= x >= 2.0 * std::cbrt(5.0) * c;
      ++bounded;
    }
  }
  ok &= worst <= tol.ac3_oracle;
  return {ok, "max |x_c - oracle| = " + fmt(worst) + ", two-sided bounds checked at " + std::to_string(bounded) +
                  " of " + std::to_string(delta_sweep().size()) + " deltas"};
}

Outcome ac4(const VerifyTolerances& tol) {
  const std::vector<std::pair<double, double>> cases{{1.0, 1e-4}, {1.0, 1e-6}, {1.5, 1e-3}, {0.8, 1e-4}, {2.0, 1e-2}};
  double worst = 0.0;
  for (auto [R, d] : cases) {
    const IncompressibleProfile prof = profile_for_radius(R, d, R, 20001);
    const double quad = radial_integral(prof.n_inc, 0.0);
    const double formula = mass_formula(R, d);
    worst = std::max(worst, std::abs(quad - formula) / formula);
  }
  return {worst < tol.ac4_mass_rel, "max relative mass mismatch " + fmt(worst) + " over 5 (R, delta) pairs"};
}

Outcome ac5(const VerifyTolerances& tol) {
  bool ok = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  int n = 0;
  for (double d : delta_sweep()) {
    if (!lower_bound_applies(1.0, d)) continue;
    const double ratio = 0.5 * solve_xc(1.0, d) / jump_asymptotic(1.0, d);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ok &= ratio >= tol.ac5_ratio_lo && ratio <= tol.ac5_ratio_hi;
    ++n;
  }
  return {ok && n > 0, "lambda_c/asymptote in [" + fmt(lo) + ", " + fmt(hi) + "] over " + std::to_string(n) +
                           " feasible deltas"};
}

Outcome ac6(const VerifyTolerances& tol) {
  double worst = 0.0;
  for (double d : {1e-3, 1e-4, 1e-6, 1e-8}) {
    const GeneralLimitProfile g = lambda_general(1.0, d, PotentialSpec::quadratic());
    worst = std::max(worst, std::abs(g.lambda - 0.5 * solve_xc(1.0, d)));
  }
  double ident = 0.0;
  for (double R : {0.5, 1.0, 1.7, 3.0}) {
    const double a = 0.5 * std::cbrt(12.0) * std::cbrt(4.0 * R * R);
    const double b = std::cbrt(6.0) * std::cbrt(R * R);
    ident = std::max(ident, std::abs(a - b) / b);
  }
  const bool ok = worst <= tol.ac6_lambda && ident <= 4.0 * std::numeric_limits<double>::epsilon();
  return {ok, "max |lambda_general - lambda_c| = " + fmt(worst) + ", identity rel. gap " + fmt(ident)};
}

Outcome ac7(const VerifyTolerances& tol) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  for (const char* name : {"r^4", "exp(r)-1"}) {
    const PotentialSpec V = test_potential(name);
    const GeneralLimitProfile g = lambda_general(1.0, 1e-6, V);
    const double ratio = g.lambda / g.jump_asymptote;
    ok &= ratio >= tol.ac7_ratio_lo && ratio <= tol.ac7_ratio_hi;
    os << name << ": ratio " << fmt(ratio) << "; ";
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  os << fmt(secs) << " s";
  return {ok && secs < tol.ac7_seconds, os.str()};
}

Outcome ac8(const VerifyTolerances& tol) {
  Params p;
  p.gamma = 4.0;
  p.delta = 1e-2;
  const RadialGrid grid = build_grid(10.0, 300);
  p.eps = grid.spacing();
  const DensityField n0 = make_initial(InitialKind::truncated_arctan, grid, {0.8, 2.0, 0.2});
  EvolutionConfig cfg;
  cfg.dt = 1e-7;
  cfg.t_end = 1e4 * cfg.dt;
  cfg.output_every = 1;
  cfg.stop_on_stall = false;
  const auto t0 = Clock::now();
  const RunResult res = run(n0, p, cfg);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const double m0 = res.diagnostics.front().mass;
  double drift = 0.0;
  double rise = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < res.diagnostics.size(); ++k) {
    const auto& a = res.diagnostics[k - 1];
    const auto& b = res.diagnostics[k];
    drift = std::max(drift, std::abs(b.mass - m0) / m0);
    rise = std::max(rise, (b.energy - a.energy) / std::abs(a.energy));
  }
  const bool ok = res.steps == 10000 && res.halvings == 0 && drift < tol.ac8_mass_rel &&
                  rise <= tol.ac8_energy_rel && secs < tol.ac8_seconds;
  return {ok, std::to_string(res.steps) + " steps, mass drift " + fmt(drift) + ", max relative energy change " +
                  fmt(rise) + ", " + fmt(secs) + " s"};
}

Outcome ac9(const VerifyTolerances& tol) {
  Params p;
  p.gamma = 10.0;
  p.delta = 0.05;
  p.eps = 1e-10;
  p.mass = 0.4;
  p.r_b = 1.6;
  const auto t0 = Clock::now();
  const StationaryProfile prof = find_radius_for_mass(p.mass, p);
  const RadialGrid grid = build_grid(p.r_b, 41);
  const double h = grid.spacing();
  const DensityField target = sample_on(prof, grid);
  DensityField n0 = target;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    if (r < prof.R) n0[i] += 0.05 * target[i] * std::cos(std::numbers::pi * r / prof.R);
  }
  const double scale = mass(target, p) / mass(n0, p);
  for (double& x : n0.values) x *= scale;
  EvolutionConfig cfg;
  cfg.dt = 0.9 * stability_limit(n0, p);
  cfg.t_end = 1e3;
  cfg.output_every = 1u << 30;
  const RunResult res = run(n0, p, cfg);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(res.final_state[i] - target[i]));
  const bool ok = res.stalled && err < tol.ac9_h2_factor * h * h && secs < tol.ac9_seconds;
  return {ok, std::string(res.stalled ? "stalled" : "did not stall") + " at t = " + fmt(res.t) + ", sup error " +
                  fmt(err) + " = " + fmt(err / (h * h)) + " h^2, " + fmt(secs) + " s"};
}

Outcome ac10(const VerifyTolerances& tol) {
  Params base;
  const GammaSweepReport rep = gamma_sweep(0.4, 1e-2, {10.0, 50.0, 250.0}, 1000, base, 3);
  bool ok = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const SweepRow& r = rep.rows[k];
    if (r.error) return {false, "gamma = " + fmt(r.gamma) + ": " + *r.error};
    if (k > 0) {
      ok &= r.sup_err < rep.rows[k - 1].sup_err;
      ok &= r.R_err < rep.rows[k - 1].R_err;
    }
    os << "g=" << fmt(r.gamma) << " sup " << fmt(r.sup_err) << " dR " << fmt(r.R_err) << "; ";
  }
  const double band = rep.rows.back().p_at_R0 / rep.rows.back().lambda_c;
  ok &= band >= tol.ac10_band_lo && band <= tol.ac10_band_hi;
  os << "p(R0)/lambda_c = " << fmt(band) << " at gamma 250";
  return {ok, os.str()};
}

Outcome ac11(const VerifyTolerances& tol) {
  const GrowthReplica rep = growth_replica();
  const RadialGrid grid = build_grid(rep.r_b, rep.n_nodes);
  const DensityField n0 = make_initial(InitialKind::truncated_arctan, grid, rep.shape);
  const RunResult res = run(n0, rep.params, rep.config);
  const auto [lo, hi] = interior_pressure_range(res.final_state, rep.params.gamma);
  const bool done = std::abs(res.t - rep.config.t_end) < 1e-9;
  const bool ok = done && lo >= tol.ac11_p_lo && hi <= tol.ac11_p_hi;
  std::ostringstream os;
  os << "reached t = " << res.t << " in " << res.steps << " steps; interior pressure in [" << std::setprecision(10)
     << lo << ", " << hi << "]";
  return {ok, os.str()};
}

const std::map<std::string, std::pair<std::string, std::function<Outcome(const VerifyTolerances&)>>>& registry() {
  static const std::map<std::string, std::pair<std::string, std::function<Outcome(const VerifyTolerances&)>>> r{
      {"AC1", {"closed-form stationary profile at lambda = R^2", ac1}},
      {"AC2", {"lambda bisection", ac2}},
      {"AC3", {"x_c root and bounds", ac3}},
      {"AC4", {"mass formula vs quadrature", ac4}},
      {"AC5", {"jump asymptote ratio", ac5}},
      {"AC6", {"general potential reduces to the quadratic case", ac6}},
      {"AC7", {"general-potential asymptote", ac7}},
      {"AC8", {"mass conservation and energy dissipation", ac8}},
      {"AC9", {"relaxation to the stationary state", ac9}},
      {"AC10", {"incompressible-limit gamma sweep", ac10}},
      {"AC11", {"growth run pressure plateau", ac11}},
  };
  return r;
}

}  // namespace

std::vector<std::string> criterion_ids() {
  return {"AC1", "AC2", "AC3", "AC4", "AC5", "AC6", "AC7", "AC8", "AC9", "AC10", "AC11"};
}

std::string criterion_title(const std::string& id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw InvalidArgument("unknown criterion '" + id + "'");
  return it->second.first;
}

CriterionResult run_criterion(const std::string& id, const VerifyTolerances& tol) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw InvalidArgument("unknown criterion '" + id + "'");
  CriterionResult res{.id = id, .title = it->second.first, .detail = {}};
  const auto t0 = Clock::now();
  try {
    const Outcome o = it->second.second(tol);
    res.passed = o.passed;
    res.detail = o.detail;
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

std::vector<CriterionResult> run_criteria(const std::vector<std::string>& ids, const VerifyTolerances& tol,
                                          std::ostream* log) {
  const std::vector<std::string> todo = ids.empty() ? criterion_ids() : ids;
  for (const auto& id : todo) criterion_title(id);  // reject unknown ids before running anything
  std::vector<CriterionResult> out;
  for (const auto& id : todo) {
    out.push_back(run_criterion(id, tol));
    if (log) *log << format_result(out.back()) << std::endl;
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << std::left << std::setw(5) << r.id << (r.passed ? "PASS" : "FAIL") << "  " << r.title << " -- " << r.detail;
  return os.str();
}

GrowthReplica growth_replica() {
  GrowthReplica rep;
  rep.params.gamma = 10.0;
  rep.params.delta = 1e-2;
  rep.params.potential = PotentialSpec::none();
  rep.params.r_b = rep.r_b;
  rep.params.eps = rep.r_b / static_cast<double>(rep.n_nodes - 1);
  rep.config.dt = 1e-7;
  rep.config.t_end = 2.11;
  rep.config.source = GrowthSpec{10.0, 1.0};
  rep.config.output_every = 100000;
  rep.config.snapshot_times = {0.0, 0.31, 1.14, 2.11};
  return rep;
}

std::pair<double, double> interior_pressure_range(const DensityField& n, double gamma) {
  double front = -1.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] > 0.5) front = n.grid.node(i);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (front < 0.0) return {nan, nan};
  const PressureLaw law(gamma);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n.size() && n.grid.node(i) <= 0.5 * front; ++i) {
    lo = std::min(lo, law(n[i]));
    hi = std::max(hi, law(n[i]));
  }
  return {lo, hi};
}

}  // namespace chradial
