#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "chradial/grid.hpp"

namespace chradial {

/// Confining potential V(r).  Custom potentials carry their own derivative;
/// the general-potential formulas need V'(R) to full accuracy.
class PotentialSpec {
 public:
  enum class Kind { quadratic, custom, none };
  using Fn = std::function<double(double)>;

  /// V(r) = r^2.
  static PotentialSpec quadratic();
  /// V = 0 (the source-driven runs have no confinement).  Not admissible for
  /// the limit-profile machinery, which needs a strictly increasing V.
  static PotentialSpec none();
  /// Validates V' > 0 on `probes` equispaced nodes of (0, r_probe_max].
  static PotentialSpec custom(std::string name, Fn value, Fn slope, double r_probe_max,
                              std::size_t probes = 64);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool strictly_increasing() const noexcept { return kind_ != Kind::none; }

  double value(double r) const;
  double slope(double r) const;

 private:
  PotentialSpec(Kind kind, std::string name, Fn value, Fn slope);

  Kind kind_;
  std::string name_;
  Fn value_;
  Fn slope_;
};

struct Params {
  double gamma = 4.0;
  double delta = 1e-2;
  double eps = 0.0;
  double mass = 0.4;
  double r_b = 2.0;
  PotentialSpec potential = PotentialSpec::quadratic();
  double tol_root = 1e-12;
  double tol_newton = 1e-10;

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

/// max(0, n)^gamma with a repeated-squaring path for integer exponents, which
/// the explicit integrator evaluates tens of millions of times.
class PressureLaw {
 public:
  explicit PressureLaw(double gamma);

  double gamma() const noexcept { return gamma_; }
  double operator()(double n) const noexcept;
  /// d/dn max(0,n)^gamma; zero for n <= 0.
  double derivative(double n) const noexcept;
  /// max(0,n)^(gamma+1)/(gamma+1), the pressure part of the energy density.
  double antiderivative(double n) const noexcept;

 private:
  double power(double x, double e, long ie) const noexcept;

  double gamma_;
  long int_gamma_;  // -1 when gamma is not an integer
};

double pressure(double n, double gamma);

/// Truncated mobility: eps for n <= eps, n otherwise.
double mobility(double n, double eps) noexcept;

/// Regularized entropy density with phi'' = 1/mobility and phi(1) = phi'(1) = 0.
double entropy_phi(double x, double eps);

/// mu = max(0,n)^gamma - delta * (1/(r+eps)) d/dr((r+eps) dn/dr), nodewise.
DensityField chemical_potential(const DensityField& n, const Params& p);

/// H(z) = int_z^R u V(u) du.  Closed form for the quadratic potential,
/// adaptive Gauss-Kronrod otherwise.
double H_integral(double z, double R, const PotentialSpec& V);

}  // namespace chradial
