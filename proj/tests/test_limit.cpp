#include <catch_amalgamated.hpp>

#include <cmath>

#include "chradial/errors.hpp"
#include "chradial/limit.hpp"

using namespace chradial;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// f(x) = sum_{k>=3} x^k / (k (k-1))
double f_series(double x) {
  double sum = 0.0, xk = x * x;
  for (int k = 3; k < 400; ++k) {
    xk *= x;
    sum += xk / (k * (k - 1.0));
  }
  return sum;
}

double fprime_series(double x) {
  double sum = 0.0, xj = x;
  for (int j = 2; j < 400; ++j) {
    xj *= x;
    sum += xj / j;
  }
  return sum;
}

double xc_bisect(double R, double delta) {
  const double target = 8.0 * delta / std::pow(R, 4);
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f_series(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// general solution r^4/16 - c r^2/4 + A ln r + B (times 1/delta) fitted to u(R) = u'(R) = 0
double u_direct(double r, double R, double lambda, double delta) {
  const double c = R * R - lambda;
  const double A = -R * (R * R * R / 4.0 - c * R / 2.0);
  const double B = -(std::pow(R, 4) / 16.0 - c * R * R / 4.0) - A * std::log(R);
  return (std::pow(r, 4) / 16.0 - c * r * r / 4.0 + A * std::log(r) + B) / delta;
}

double simpson_mass(const IncompressibleProfile& prof, int n) {
  const double h = prof.R / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * r * prof.density_at(r);
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("f matches its power series") {
  for (double x : {1e-6, 1e-3, 0.05, 0.2, 0.29, 0.31, 0.5, 0.8}) {
    CHECK_THAT(f_xc(x), WithinRel(f_series(x), 1e-12));
    CHECK_THAT(f_xc_derivative(x), WithinRel(fprime_series(x), 1e-12));
  }
  CHECK(f_xc(0.0) == 0.0);
}

TEST_CASE("x_c agrees with an independent bisection") {
  for (double R : {0.8, 1.0, 1.5}) {
    for (double d : {1e-2, 1e-3, 1e-4, 1e-6, 1e-8}) {
      if (!(16.0 * d < std::pow(R, 4))) continue;
      CHECK_THAT(solve_xc(R, d), WithinAbs(xc_bisect(R, d), 1e-12));
    }
  }
}

TEST_CASE("x_c for R = 1, delta = 1e-4") {
  const double x = solve_xc(1.0, 1e-4);
  CHECK_THAT(x, WithinAbs(0.163860563050226, 1e-13));
  CHECK_THAT(mass_formula(1.0, 1e-4), WithinRel(0.458302361924560, 1e-12));
}

TEST_CASE("x_c obeys the cube-root bounds") {
  for (double d : {1e-5, 1e-6, 1e-7, 1e-8}) {
    const double x = solve_xc(1.0, d);
    CHECK(x <= 2.0 * std::cbrt(6.0 * d));
    CHECK(x >= 2.0 * std::cbrt(5.0 * d));
  }
  CHECK(solve_xc(1.0, 1e-3) <= 2.0 * std::cbrt(6.0 * 1e-3));
}

TEST_CASE("x_c is infeasible when 16 delta >= R^4") {
  CHECK_THROWS_AS(solve_xc(1.0, 1.0 / 16.0), SolverError);
  CHECK_THROWS_AS(solve_xc(0.5, 0.01), SolverError);
}

TEST_CASE("reference solution matches the direct fit") {
  const double R = 1.2, lambda = 0.3, delta = 0.02;
  for (double r : {0.3, 0.6, 1.0, 1.19, 1.2}) {
    CHECK_THAT(reference_u(r, R, lambda, delta).value, WithinAbs(u_direct(r, R, lambda, delta), 1e-10));
    const double h = 1e-6;
    if (r + h <= R) {
      const double fd = (u_direct(r + h, R, lambda, delta) - u_direct(r - h, R, lambda, delta)) / (2 * h);
      CHECK_THAT(reference_u(r, R, lambda, delta).slope, WithinAbs(fd, 1e-6));
    }
  }
  CHECK(reference_u(R, R, lambda, delta).value == 0.0);
  CHECK_THROWS_AS(reference_u(0.0, R, lambda, delta), InvalidArgument);
  CHECK_THROWS_AS(reference_u(1.3, R, lambda, delta), InvalidArgument);
}

TEST_CASE("limit profile glues smoothly at R0 and jumps in pressure") {
  for (auto [R, d] : {std::pair{1.0, 1e-4}, std::pair{1.0939, 1e-2}, std::pair{2.0, 1e-3}}) {
    const IncompressibleProfile prof = profile_for_radius(R, d, 1.5 * R, 301);
    const ValueSlope u = reference_u(prof.R0, R, prof.lambda_c, d);
    CHECK_THAT(u.value, WithinAbs(1.0, 1e-9));
    CHECK_THAT(u.slope, WithinAbs(0.0, 1e-7));
    CHECK_THAT(prof.pressure_at(prof.R0), WithinRel(prof.lambda_c, 1e-12));
    CHECK(prof.pressure_at(prof.R0 + 1e-9) == 0.0);
    CHECK_THAT(prof.lambda_c, WithinRel(0.5 * R * R * prof.x_c, 1e-15));
    for (std::size_t i = 0; i < prof.n_inc.size(); ++i) {
      CHECK(prof.n_inc[i] >= 0.0);
      CHECK(prof.n_inc[i] <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("mass formula against quadrature of the profile") {
  for (auto [R, d] : {std::pair{1.0, 1e-4}, std::pair{1.5, 1e-3}, std::pair{2.0, 1e-2}}) {
    const IncompressibleProfile prof = profile_for_radius(R, d, R, 101);
    CHECK_THAT(simpson_mass(prof, 200000), WithinRel(mass_formula(R, d), 1e-7));
  }
}

TEST_CASE("mass is increasing along the admissible branch") {
  const double d = 1e-2;
  const double R_min = std::pow(16.0 * d, 0.25);
  double prev = minimum_mass(d, MassFeasibility::monotone_branch);
  for (int k = 1; k <= 60; ++k) {
    const double R = R_min * (1.0 + 0.05 * k * k / 60.0);
    const double m = mass_formula(R, d);
    CHECK(m > prev);
    prev = m;
  }
  CHECK_THAT(minimum_mass(d, MassFeasibility::monotone_branch), WithinRel(2.0 / 3.0 * 0.1, 1e-15));
  CHECK_THAT(minimum_mass(d, MassFeasibility::existence_bound), WithinRel(7.2, 1e-15));
}

TEST_CASE("radius_for_mass inverts the mass formula") {
  for (double d : {1e-2, 1e-4, 1e-6}) {
    for (double m : {0.4, 1.0, 5.0}) {
      const double R = radius_for_mass(m, d);
      CHECK_THAT(mass_formula(R, d), WithinRel(m, 1e-12));
    }
  }
  CHECK_THAT(radius_for_mass(0.4, 1e-2), WithinRel(1.09391209620432, 1e-12));
}

TEST_CASE("feasibility modes") {
  const double d = 1e-2;
  CHECK_THROWS_AS(radius_for_mass(72.0 * std::sqrt(d), d, MassFeasibility::existence_bound), SolverError);
  CHECK_NOTHROW(radius_for_mass(72.0 * std::sqrt(d) * 1.01, d, MassFeasibility::existence_bound));
  CHECK_THROWS_AS(radius_for_mass(0.4, d, MassFeasibility::existence_bound), SolverError);
  CHECK_NOTHROW(radius_for_mass(0.4, d, MassFeasibility::monotone_branch));
  CHECK_THROWS_AS(radius_for_mass(0.06, d, MassFeasibility::monotone_branch), SolverError);
}

TEST_CASE("jump approaches its cube-root asymptote") {
  double prev = 0.0;
  for (double d : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    const double ratio = 0.5 * solve_xc(1.0, d) / jump_asymptotic(1.0, d);
    CHECK(ratio < 1.0);
    CHECK(ratio > prev);
    prev = ratio;
  }
  CHECK(prev > 0.998);
  CHECK_THAT(jump_asymptotic(2.0, 1e-3), WithinRel(std::cbrt(6.0 * 4.0 * 1e-3), 1e-14));
}

TEST_CASE("gamma sweep approaches the limit profile") {
  Params base;
  base.r_b = 2.0;
  const GammaSweepReport rep = gamma_sweep(0.4, 1e-2, {10.0, 50.0, 250.0}, 400, base, 2);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) REQUIRE_FALSE(row.error);
  CHECK(rep.rows[0].sup_err > rep.rows[1].sup_err);
  CHECK(rep.rows[1].sup_err > rep.rows[2].sup_err);
  CHECK(rep.rows[0].R_err > rep.rows[1].R_err);
  CHECK(rep.rows[1].R_err > rep.rows[2].R_err);
  CHECK(rep.rows[2].R_err < 0.01);
  for (const auto& row : rep.rows) {
    CHECK(row.p_at_R0 > 0.5 * row.lambda_c);
    CHECK(row.p_at_R0 < 1.5 * row.lambda_c);
  }
}
