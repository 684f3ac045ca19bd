#include "chradial/general_potential.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "chradial/errors.hpp"

namespace chradial {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

constexpr double kTauMax = 1.0 - 1e-12;

// log(1 - tau)/tau + 1, with the removable singularity at 0 handled by series.
double log_factor(double tau) {
  if (tau < 1e-4) return -tau / 2.0 - tau * tau / 3.0 - tau * tau * tau / 4.0;
  return std::log1p(-tau) / tau + 1.0;
}

void check_R(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("R must be positive and finite");
}

}  // namespace

HCache::HCache(double R, PotentialSpec V, std::size_t intervals) : R_(R), V_(std::move(V)) {
  check_R(R);
  if (!V_.strictly_increasing()) throw InvalidArgument("general potential must be strictly increasing");
  if (V_.kind() == PotentialSpec::Kind::quadratic) return;
  if (intervals < 16) intervals = 16;
  dz_ = R / static_cast<double>(intervals);
  values_.assign(intervals + 1, 0.0);
  slopes_.assign(intervals + 1, 0.0);
  tail_.assign(intervals + 1, 0.0);
  auto integrand = [this](double u) { return u * V_.value(u); };
  // accumulate from z = R downwards so H(R) = 0 exactly
  for (std::size_t k = intervals; k-- > 0;) {
    values_[k] = values_[k + 1] + gauss_kronrod<double, 15>::integrate(integrand, k * dz_, cell_end(k), 0);
  }
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double z = k == intervals ? R : static_cast<double>(k) * dz_;
    slopes_[k] = -z * V_.value(z);
  }
  for (std::size_t k = intervals; k-- > 1;) {
    tail_[k] = tail_[k + 1] + log_integral(k * dz_, cell_end(k));
  }
}

std::size_t HCache::cell_of(double z) const {
  const std::size_t last = values_.size() - 1;
  const auto k = static_cast<std::size_t>(z / dz_);
  return k >= last ? last - 1 : k;
}

double HCache::cell_end(std::size_t k) const {
  return k + 2 == values_.size() ? R_ : static_cast<double>(k + 1) * dz_;
}

// int_a^b H(z)/z dz = int_{ln a}^{ln b} H(e^t) dt; smooth even for a -> 0.
double HCache::log_integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  auto integrand = [this, a, b](double t) { return (*this)(std::clamp(std::exp(t), a, b)); };
  return gauss<double, 20>::integrate(integrand, std::log(a), std::log(b));
}

double HCache::operator()(double z) const {
  if (!(z >= 0.0 && z <= R_)) {
    std::ostringstream os;
    os << "H: argument " << z << " outside [0, " << R_ << "]";
    throw InvalidArgument(os.str());
  }
  if (V_.kind() == PotentialSpec::Kind::quadratic) return H_integral(z, R_, V_);
  const std::size_t k = cell_of(z);
  const double z0 = static_cast<double>(k) * dz_;
  const double h = cell_end(k) - z0;
  const double t = (z - z0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] + h11 * h * slopes_[k + 1];
}

double HCache::over_z_integral(double r) const {
  if (!(r > 0.0) || r > R_) throw InvalidArgument("int H(z)/z dz: need 0 < r <= R");
  if (r == R_) return 0.0;
  if (V_.kind() == PotentialSpec::Kind::quadratic) {
    // (R^4/4) ln(R/r) - (R^4 - r^4)/16
    const double R4 = R_ * R_ * R_ * R_;
    return -0.25 * R4 * std::log1p((r - R_) / R_) - (R_ - r) * (R_ + r) * (R_ * R_ + r * r) / 16.0;
  }
  const std::size_t k = cell_of(r);
  return log_integral(r, cell_end(k)) + tail_[k + 1];
}

GeneralLimitSolver::GeneralLimitSolver(double R, PotentialSpec V) : cache_(R, std::move(V)) {}

ValueSlope GeneralLimitSolver::solution(double r, double lambda, double delta) const {
  const double R = cache_.R();
  if (!(r > 0.0) || r > R) {
    std::ostringstream os;
    os << "solution_n_general: need 0 < r <= R, got r = " << r;
    throw InvalidArgument(os.str());
  }
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const double a = cache_.potential().value(R) - lambda;
  const double d2 = (R - r) * (R + r);
  const double value = R * R / (2.0 * delta) * a * std::log1p((r - R) / R) + d2 / (4.0 * delta) * a +
                       H_over_z_integral(r) / delta;
  const double slope = (d2 * a - 2.0 * cache_(r)) / (2.0 * delta * r);
  return {value, slope};
}

double GeneralLimitSolver::F(double tau) const {
  if (!(tau >= 0.0 && tau < 1.0)) throw InvalidArgument("F: tau must lie in [0, 1)");
  if (tau == 0.0) return 0.0;
  const double R0 = cache_.R() * std::sqrt(1.0 - tau);
  return cache_(R0) * log_factor(tau) + 2.0 * H_over_z_integral(R0);
}

double GeneralLimitSolver::F_derivative(double tau) const {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("F': tau must lie in (0, 1)");
  const double R = cache_.R();
  const double R0 = R * std::sqrt(1.0 - tau);
  const double bracket = 0.5 * R * R * tau * cache_.potential().value(R0) - cache_(R0);
  return log_factor(tau) / tau * bracket;
}

double GeneralLimitSolver::solve_tau(double delta) const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be positive");
  const double target = 2.0 * delta;
  double lo = 0.0;
  double hi = kTauMax;
  const double F_top = F(hi);
  if (!(F_top > target)) {
    std::ostringstream os;
    os << "no saturation radius: 2 delta = " << target << " exceeds sup F = " << F_top;
    throw SolverError(SolverError::Kind::infeasible, os.str());
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (F(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double tau = 0.5 * (lo + hi);
  if (tau > 0.0) {
    const double dF = F_derivative(tau);
    if (dF > 0.0) {
      const double polished = tau - (F(tau) - target) / dF;
      if (polished > lo && polished < hi) tau = polished;
    }
  }
  return tau;
}

ValueSlope solution_n_general(double r, double R, double lambda, double delta, const PotentialSpec& V) {
  return GeneralLimitSolver(R, V).solution(r, lambda, delta);
}

double F_tau(double tau, double R, const PotentialSpec& V) { return GeneralLimitSolver(R, V).F(tau); }

double solve_tau(double R, double delta, const PotentialSpec& V) {
  return GeneralLimitSolver(R, V).solve_tau(delta);
}

GeneralLimitProfile lambda_general(double R, double delta, const PotentialSpec& V) {
  const GeneralLimitSolver solver(R, V);
  GeneralLimitProfile out;
  out.R = R;
  out.potential = V.name();
  out.tau = solver.solve_tau(delta);
  out.R0 = R * std::sqrt(1.0 - out.tau);
  out.lambda = V.value(R) - 2.0 * solver.H(out.R0) / (R * R * out.tau);
  const JumpAsymptote a = jump_general_asymptote(R, delta, V);
  out.jump_asymptote = a.jump;
  out.width_asymptote = a.width;
  return out;
}

JumpAsymptote jump_general_asymptote(double R, double delta, const PotentialSpec& V) {
  check_R(R);
  const double dV = V.slope(R);
  if (!(dV > 0.0)) throw InvalidArgument("V'(R) must be positive");
  const double c = std::cbrt(12.0 * delta);
  return {0.5 * c * std::cbrt(dV * dV), 2.0 * c * R / std::cbrt(dV)};
}

PotentialSpec test_potential(const std::string& name, double r_probe_max) {
  if (name == "r^2") return PotentialSpec::quadratic();
  if (name == "r^2-quadrature") {
    return PotentialSpec::custom(
        name, [](double r) { return r * r; }, [](double r) { return 2.0 * r; }, r_probe_max);
  }
  if (name == "r^4") {
    return PotentialSpec::custom(
        name, [](double r) { return r * r * r * r; }, [](double r) { return 4.0 * r * r * r; },
        r_probe_max);
  }
  if (name == "exp(r)-1") {
    return PotentialSpec::custom(
        name, [](double r) { return std::expm1(r); }, [](double r) { return std::exp(r); }, r_probe_max);
  }
  throw InvalidArgument("unknown potential '" + name + "'");
}

std::vector<std::string> test_potential_names() { return {"r^2", "r^2-quadrature", "r^4", "exp(r)-1"}; }

std::vector<GeneralSweepRow> general_delta_sweep(double R, const std::vector<double>& deltas,
                                                 const PotentialSpec& V) {
  const GeneralLimitSolver solver(R, V);
  std::vector<GeneralSweepRow> rows;
  rows.reserve(deltas.size());
  for (double d : deltas) {
    GeneralSweepRow row{};
    row.delta = d;
    row.tau = solver.solve_tau(d);
    row.R0 = R * std::sqrt(1.0 - row.tau);
    row.lambda = V.value(R) - 2.0 * solver.H(row.R0) / (R * R * row.tau);
    row.lambda_asymptote = jump_general_asymptote(R, d, V).jump;
    row.ratio = row.lambda / row.lambda_asymptote;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace chradial
