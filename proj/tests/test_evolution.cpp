#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "chradial/errors.hpp"
#include "chradial/evolution.hpp"

using namespace chradial;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Params confined(double eps) {
  Params p;
  p.gamma = 4.0;
  p.delta = 1e-2;
  p.eps = eps;
  p.r_b = 2.0;
  return p;
}

EvolutionConfig plain(double dt, double t_end) {
  EvolutionConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.stop_on_stall = false;
  c.output_every = 50;
  return c;
}

}  // namespace

TEST_CASE("initial conditions") {
  const RadialGrid g(4.0, 401);
  const DensityField a = make_initial(InitialKind::truncated_arctan, g, {0.8, 2.0, 0.2});
  CHECK_THAT(a[0], WithinAbs(0.8, 1e-15));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(a[i] <= a[i - 1]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node(i) >= 3.0) CHECK(a[i] == 0.0);
  }
  // half height near the interface
  CHECK_THAT(a[200], WithinAbs(0.4, 0.02));

  const DensityField b = make_initial(InitialKind::gaussian_bump, g, {1.0, 0.0, 0.5});
  CHECK_THAT(b[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(b[1] - b[0], WithinAbs(0.0, 1e-3));
  const DensityField c = make_initial(InitialKind::constant, g, {0.3, 0.0, 1.0});
  for (double x : c.values) CHECK(x == 0.3);

  CHECK(parse_initial_kind(to_string(InitialKind::gaussian_bump)) == InitialKind::gaussian_bump);
  CHECK_THROWS_AS(parse_initial_kind("step"), InvalidArgument);
  CHECK_THROWS_AS(make_initial(InitialKind::gaussian_bump, g, {1.0, 1.0, 0.0}), InvalidArgument);
}

TEST_CASE("mass is conserved and energy decreases without a source") {
  for (double eps : {0.0, 0.02}) {
    for (FaceAverage avg : {FaceAverage::arithmetic, FaceAverage::harmonic}) {
      const Params p = confined(eps);
      const RadialGrid g(p.r_b, 81);
      DensityField n = make_initial(InitialKind::gaussian_bump, g, {0.9, 0.6, 0.3});
      EvolutionConfig cfg = plain(0.0, 1.0);
      cfg.face_average = avg;
      cfg.dt = 0.5 * stability_limit(n, p);
      Stepper stepper(g, p, cfg);
      const double m0 = mass(n, p);
      double e_prev = energy(n, p);
      for (int k = 0; k < 2000; ++k) {
        stepper.checked_step(n.values, cfg.dt);
        const double e = energy(n, p);
        CHECK(e <= e_prev + 1e-12 * std::abs(e_prev));
        e_prev = e;
      }
      CHECK_THAT(mass(n, p), WithinRel(m0, 1e-12));
      CHECK_THAT(stepper.energy_of(n.values), WithinRel(energy(n, p), 1e-12));
    }
  }
}

TEST_CASE("constant state without confinement is a fixed point") {
  Params p = confined(0.01);
  p.potential = PotentialSpec::none();
  const RadialGrid g(1.0, 41);
  const DensityField n0 = make_initial(InitialKind::constant, g, {0.7, 0.0, 1.0});
  const DensityField n1 = step(n0, p, plain(1e-6, 1.0));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK_THAT(n1[i], WithinAbs(0.7, 1e-15));
}

TEST_CASE("growth source on a flat state is a forward-Euler logistic step") {
  Params p = confined(0.01);
  p.potential = PotentialSpec::none();
  const RadialGrid g(1.0, 41);
  const double c = 0.9;
  const double dt = 0.5 * stability_limit(DensityField::constant(g, 1.0), p);
  EvolutionConfig cfg = plain(dt, 1.0);
  cfg.source = GrowthSpec{10.0, 1.0};
  const DensityField n1 = step(DensityField::constant(g, c), p, cfg);
  const double expected = c + dt * c * 10.0 * (1.0 - std::pow(c, p.gamma));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK_THAT(n1[i], WithinRel(expected, 1e-14));
  // at the homeostatic pressure nothing changes
  const DensityField n2 = step(DensityField::constant(g, 1.0), p, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK_THAT(n2[i], WithinAbs(1.0, 1e-15));
}

TEST_CASE("stability limit scales like h^4 for small delta-dominated steps") {
  const Params p = confined(0.0);
  const DensityField a = DensityField::constant(RadialGrid(2.0, 41), 0.5);
  const DensityField b = DensityField::constant(RadialGrid(2.0, 81), 0.5);
  const double ratio = stability_limit(a, p) / stability_limit(b, p);
  CHECK(ratio > 10.0);
  CHECK(ratio < 17.0);
}

TEST_CASE("guard halves or refuses an oversized step") {
  const Params p = confined(0.0);
  const RadialGrid g(p.r_b, 81);
  const DensityField n0 = make_initial(InitialKind::gaussian_bump, g, {0.9, 0.6, 0.3});
  const double limit = stability_limit(n0, p);

  EvolutionConfig cfg = plain(10.0 * limit, 1.0);
  Stepper adaptive(g, p, cfg);
  std::vector<double> n = n0.values;
  const double used = adaptive.checked_step(n, cfg.dt);
  CHECK(used <= limit);
  CHECK(adaptive.halvings() > 0);

  cfg.adaptive_guard = false;
  Stepper strict(g, p, cfg);
  n = n0.values;
  try {
    strict.checked_step(n, cfg.dt);
    FAIL("expected a stability error");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::stability_guard);
  }
}

TEST_CASE("unguarded blow-up is detected") {
  const Params p = confined(0.0);
  const RadialGrid g(p.r_b, 81);
  std::vector<double> n = make_initial(InitialKind::gaussian_bump, g, {0.9, 0.6, 0.3}).values;
  Stepper stepper(g, p, plain(1.0, 1.0));
  try {
    for (int k = 0; k < 100; ++k) stepper.advance(n, 1e3 * stability_limit(DensityField(g, n), p));
    FAIL("expected blow-up");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::blow_up);
  }
}

TEST_CASE("run records snapshots and diagnostics") {
  const Params p = confined(0.02);
  const RadialGrid g(p.r_b, 41);
  const DensityField n0 = make_initial(InitialKind::gaussian_bump, g, {0.9, 0.6, 0.3});
  EvolutionConfig cfg = plain(0.5 * stability_limit(n0, p), 0.0);
  cfg.t_end = 200 * cfg.dt;
  cfg.snapshot_times = {0.0, 100 * cfg.dt, cfg.t_end};
  const RunResult res = run(n0, p, cfg);
  CHECK(res.steps >= 200);
  CHECK_THAT(res.t, WithinRel(cfg.t_end, 1e-12));
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[0].t == 0.0);
  CHECK(res.snapshots[1].t >= 100 * cfg.dt * (1 - 1e-12));
  REQUIRE(res.diagnostics.size() >= 3);
  CHECK(res.diagnostics.front().t == 0.0);
  CHECK_THAT(res.diagnostics.back().t, WithinRel(res.t, 1e-15));
  for (std::size_t k = 1; k < res.diagnostics.size(); ++k) {
    CHECK(res.diagnostics[k].energy <= res.diagnostics[k - 1].energy);
    CHECK_THAT(res.diagnostics[k].mass, WithinRel(res.diagnostics[0].mass, 1e-12));
  }
  const DiagnosticsRow d = diagnose(res.final_state, p, res.t, cfg.dt);
  CHECK(d.mass == mass(res.final_state, p));
  CHECK(d.energy == energy(res.final_state, p));
}

TEST_CASE("run stops once the state stalls") {
  Params p = confined(0.01);
  p.potential = PotentialSpec::none();
  const RadialGrid g(1.0, 41);
  EvolutionConfig cfg = plain(1e-5, 1.0);
  cfg.stop_on_stall = true;
  cfg.stall_checks = 10;
  const RunResult res = run(DensityField::constant(g, 0.5), p, cfg);
  CHECK(res.stalled);
  CHECK(res.steps == 10);
}

TEST_CASE("csv writers use full precision") {
  const Params p = confined(0.0);
  const RadialGrid g(1.0, 11);
  DensityField n = DensityField::constant(g, 1.0 / 3.0);
  std::ostringstream os;
  write_snapshot_csv(os, n, p);
  std::string header, row;
  std::istringstream in(os.str());
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "r,n,p,mu");
  CHECK(row.rfind("0,0.33333333333333331,", 0) == 0);

  std::ostringstream dg;
  write_diagnostics_csv(dg, {diagnose(n, p, 0.0, 1e-7)});
  CHECK(dg.str().rfind("t,mass,energy,entropy,min_n,max_n,dt_used\n", 0) == 0);
}

TEST_CASE("config validation") {
  EvolutionConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = EvolutionConfig{};
  c.output_every = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}
