#include "chradial/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "chradial/errors.hpp"

namespace chradial {

PotentialSpec::PotentialSpec(Kind kind, std::string name, Fn value, Fn slope)
    : kind_(kind), name_(std::move(name)), value_(std::move(value)), slope_(std::move(slope)) {}

PotentialSpec PotentialSpec::quadratic() {
  return PotentialSpec(Kind::quadratic, "r^2", nullptr, nullptr);
}

PotentialSpec PotentialSpec::none() { return PotentialSpec(Kind::none, "none", nullptr, nullptr); }

PotentialSpec PotentialSpec::custom(std::string name, Fn value, Fn slope, double r_probe_max,
                                    std::size_t probes) {
  if (!value || !slope) throw InvalidArgument("potential '" + name + "': V and V' are both required");
  if (!(r_probe_max > 0.0)) throw InvalidArgument("potential '" + name + "': probe radius must be positive");
  if (probes < 1) probes = 1;
  for (std::size_t k = 1; k <= probes; ++k) {
    const double r = r_probe_max * static_cast<double>(k) / static_cast<double>(probes);
    const double v = value(r);
    const double dv = slope(r);
    if (!std::isfinite(v) || !std::isfinite(dv) || !(dv > 0.0)) {
      std::ostringstream os;
      os << "potential '" << name << "': V' must be positive and finite on (0, " << r_probe_max
         << "], fails at r = " << r << " (V' = " << dv << ")";
      throw InvalidArgument(os.str());
    }
  }
  return PotentialSpec(Kind::custom, std::move(name), std::move(value), std::move(slope));
}

double PotentialSpec::value(double r) const {
  switch (kind_) {
    case Kind::quadratic: return r * r;
    case Kind::none: return 0.0;
    case Kind::custom: return value_(r);
  }
  return 0.0;
}

double PotentialSpec::slope(double r) const {
  switch (kind_) {
    case Kind::quadratic: return 2.0 * r;
    case Kind::none: return 0.0;
    case Kind::custom: return slope_(r);
  }
  return 0.0;
}

void Params::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument(msg); };
  if (!(gamma > 1.0)) fail("gamma must exceed 1");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(eps >= 0.0)) fail("eps must be nonnegative");
  if (!(mass > 0.0)) fail("mass must be positive");
  if (!(r_b > 0.0)) fail("r_b must be positive");
  if (!(tol_root > 0.0)) fail("tol_root must be positive");
  if (!(tol_newton > 0.0)) fail("tol_newton must be positive");
  for (double x : {gamma, delta, eps, mass, r_b, tol_root, tol_newton}) {
    if (!std::isfinite(x)) fail("parameters must be finite");
  }
}

PressureLaw::PressureLaw(double gamma) : gamma_(gamma), int_gamma_(-1) {
  if (gamma == std::floor(gamma) && gamma >= 1.0 && gamma <= 1e6) {
    int_gamma_ = static_cast<long>(gamma);
  }
}

double PressureLaw::power(double x, double e, long ie) const noexcept {
  if (ie < 0) return std::pow(x, e);
  double result = 1.0;
  double base = x;
  for (long k = ie; k > 0; k >>= 1) {
    if (k & 1) result *= base;
    base *= base;
  }
  return result;
}

double PressureLaw::operator()(double n) const noexcept {
  if (!(n > 0.0)) return 0.0;
  return power(n, gamma_, int_gamma_);
}

double PressureLaw::derivative(double n) const noexcept {
  if (!(n > 0.0)) return 0.0;
  return gamma_ * power(n, gamma_ - 1.0, int_gamma_ < 0 ? -1 : int_gamma_ - 1);
}

double PressureLaw::antiderivative(double n) const noexcept {
  if (!(n > 0.0)) return 0.0;
  return n * (*this)(n) / (gamma_ + 1.0);
}

double pressure(double n, double gamma) { return PressureLaw(gamma)(n); }

double mobility(double n, double eps) noexcept { return n <= eps ? eps : n; }

double entropy_phi(double x, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("entropy_phi: eps must lie in (0,1)");
  if (x <= eps) return x * (std::log(eps) - 1.0) + 1.0 + x * x / (2.0 * eps) - 0.5 * eps;
  return x * (std::log(x) - 1.0) + 1.0;
}

DensityField chemical_potential(const DensityField& n, const Params& p) {
  DensityField mu = radial_laplacian(n, p.eps);
  const PressureLaw law(p.gamma);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    mu[i] = law(n[i]) - p.delta * mu[i];
    if (!std::isfinite(mu[i])) {
      std::ostringstream os;
      os << "chemical potential is not finite at node " << i << " (n = " << n[i] << ")";
      throw SolverError(SolverError::Kind::non_finite, os.str());
    }
  }
  return mu;
}

double H_integral(double z, double R, const PotentialSpec& V) {
  if (!(z <= R)) {
    std::ostringstream os;
    os << "H_integral: lower limit " << z << " exceeds R = " << R;
    throw InvalidArgument(os.str());
  }
  if (z < 0.0) throw InvalidArgument("H_integral: lower limit must be nonnegative");
  switch (V.kind()) {
    case PotentialSpec::Kind::quadratic: {
      // (R^4 - z^4)/4 factored to avoid cancellation when z is close to R
      return 0.25 * (R - z) * (R + z) * (R * R + z * z);
    }
    case PotentialSpec::Kind::none: return 0.0;
    case PotentialSpec::Kind::custom: break;
  }
  if (z == R) return 0.0;
  auto integrand = [&V](double u) { return u * V.value(u); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, z, R, 20, 1e-13);
}

}  // namespace chradial
