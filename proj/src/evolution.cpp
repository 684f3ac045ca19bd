#include "chradial/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "chradial/errors.hpp"

namespace chradial {

namespace {

constexpr double kBlowUp = 1e6;

double face_density(double a, double b, FaceAverage avg) {
  if (avg == FaceAverage::harmonic) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
  }
  return 0.5 * (a + b);
}

// phi_eps for eps in (0,1); for eps = 0 the limit x(log x - 1) + 1, extended
// by its value 1 at the origin to x <= 0.
double entropy_density(double x, double eps) {
  if (eps > 0.0) return entropy_phi(x, eps);
  if (x <= 0.0) return 1.0;
  return x * (std::log(x) - 1.0) + 1.0;
}

std::vector<double> face_weights(const RadialGrid& grid, double eps) {
  const double h = grid.spacing();
  std::vector<double> w(grid.size() - 1);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = grid.node(i) + 0.5 * h + eps;
  return w;
}

std::vector<double> potential_values(const RadialGrid& grid, const PotentialSpec& V) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = V.value(grid.node(i));
  return v;
}

// max_i of the absolute row sum of the control-volume Laplacian
double laplacian_row_bound(const std::vector<double>& area, const std::vector<double>& weight, double h) {
  double kappa = 0.0;
  for (std::size_t i = 0; i < area.size(); ++i) {
    const double wl = i > 0 ? weight[i - 1] : 0.0;
    const double wr = i < weight.size() ? weight[i] : 0.0;
    kappa = std::max(kappa, 2.0 * (wl + wr) / (h * area[i]));
  }
  return kappa;
}

double limit_from(double kappa, double n_abs_max, const Params& p) {
  const double b_max = std::max(n_abs_max, p.eps);
  const double dp_max = PressureLaw(p.gamma).derivative(n_abs_max);
  const double rate = b_max * kappa * (p.delta * kappa + dp_max);
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double abs_max(const std::vector<double>& n) {
  double m = 0.0;
  for (double x : n) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void EvolutionConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument(msg); };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("t_end must be positive");
  if (output_every < 1) fail("output_every must be at least 1");
  if (source && !(source->rate >= 0.0)) fail("growth rate must be nonnegative");
  if (!(stall_tol > 0.0)) fail("stall_tol must be positive");
  if (stall_checks < 1) fail("stall_checks must be at least 1");
  if (!(energy_tol >= 0.0)) fail("energy_tol must be nonnegative");
}

double mass(const DensityField& n, const Params& p) {
  return control_volume_integral(n.grid, n.values, p.eps);
}

double energy(const DensityField& n, const Params& p) {
  const auto area = control_volumes(n.grid, p.eps);
  const auto weight = face_weights(n.grid, p.eps);
  const PressureLaw law(p.gamma);
  const double h = n.grid.spacing();
  double bulk = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    bulk += area[i] * (law.antiderivative(n[i]) + n[i] * p.potential.value(n.grid.node(i)));
  }
  double grad = 0.0;
  for (std::size_t f = 0; f < weight.size(); ++f) {
    const double d = n[f + 1] - n[f];
    grad += weight[f] * d * d / h;
  }
  return bulk + 0.5 * p.delta * grad;
}

double entropy_total(const DensityField& n, const Params& p) {
  if (!(p.eps >= 0.0 && p.eps < 1.0)) throw InvalidArgument("entropy needs eps in [0, 1)");
  const auto area = control_volumes(n.grid, p.eps);
  double sum = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) sum += area[i] * entropy_density(n[i], p.eps);
  return sum;
}

DiagnosticsRow diagnose(const DensityField& n, const Params& p, double t, double dt_used) {
  DiagnosticsRow row;
  row.t = t;
  row.mass = mass(n, p);
  row.energy = energy(n, p);
  row.entropy = entropy_total(n, p);
  const auto [lo, hi] = std::minmax_element(n.values.begin(), n.values.end());
  row.min_n = *lo;
  row.max_n = *hi;
  row.dt_used = dt_used;
  return row;
}

double stability_limit(const DensityField& n, const Params& p) {
  const auto area = control_volumes(n.grid, p.eps);
  const auto weight = face_weights(n.grid, p.eps);
  return limit_from(laplacian_row_bound(area, weight, n.grid.spacing()), abs_max(n.values), p);
}

Stepper::Stepper(const RadialGrid& grid, Params p, EvolutionConfig cfg)
    : grid_(grid),
      p_(std::move(p)),
      cfg_(std::move(cfg)),
      law_(p_.gamma),
      area_(control_volumes(grid_, p_.eps)),
      weight_(face_weights(grid_, p_.eps)),
      V_(potential_values(grid_, p_.potential)),
      phi_(grid_.size()),
      press_(grid_.size()),
      flux_(grid_.size() - 1),
      trial_(grid_.size()) {
  p_.validate();
  cfg_.validate();
  kappa_ = laplacian_row_bound(area_, weight_, grid_.spacing());
}

double Stepper::advance(std::vector<double>& n, double dt) {
  const std::size_t N = n.size();
  const double h = grid_.spacing();
  const double inv_h = 1.0 / h;
  const double delta = p_.delta;
  const double eps = p_.eps;

  // phi = P(n) - delta * Lap n + V; the gradient flux is reused across faces
  double left = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double right = i + 1 < N ? weight_[i] * (n[i + 1] - n[i]) * inv_h : 0.0;
    press_[i] = law_(n[i]);
    phi_[i] = press_[i] - delta * (right - left) / area_[i] + V_[i];
    left = right;
  }
  for (std::size_t f = 0; f + 1 < N; ++f) {
    const double b = mobility(face_density(n[f], n[f + 1], cfg_.face_average), eps);
    flux_[f] = weight_[f] * b * (phi_[f + 1] - phi_[f]) * inv_h;
  }

  double change = 0.0;
  bool bad = false;
  left = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double right = i + 1 < N ? flux_[i] : 0.0;
    double d = dt * (right - left) / area_[i];
    if (cfg_.source) d += dt * n[i] * (*cfg_.source)(press_[i]);
    left = right;
    n[i] += d;
    change = std::max(change, std::abs(d));
    bad |= !(std::abs(n[i]) <= kBlowUp);
  }
  if (bad) {
    for (std::size_t i = 0; i < N; ++i) {
      if (!(std::abs(n[i]) <= kBlowUp)) {
        std::ostringstream os;
        os << "blow-up: n = " << n[i] << " at r = " << grid_.node(i);
        throw SolverError(SolverError::Kind::blow_up, os.str());
      }
    }
  }
  return change;
}

double Stepper::energy_of(const std::vector<double>& n) const {
  const double h = grid_.spacing();
  double bulk = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) bulk += area_[i] * (law_.antiderivative(n[i]) + n[i] * V_[i]);
  double grad = 0.0;
  for (std::size_t f = 0; f < weight_.size(); ++f) {
    const double d = n[f + 1] - n[f];
    grad += weight_[f] * d * d / h;
  }
  return bulk + 0.5 * p_.delta * grad;
}

double Stepper::checked_step(std::vector<double>& n, double dt) {
  const double limit = limit_from(kappa_, abs_max(n), p_);
  double d = dt;
  if (d > limit) {
    if (!cfg_.adaptive_guard) {
      std::ostringstream os;
      os << "stability guard: dt = " << dt << " exceeds the explicit limit " << limit
         << " (reduce dt or enable adaptive_guard)";
      throw SolverError(SolverError::Kind::stability_guard, os.str());
    }
    while (d > limit) {
      d *= 0.5;
      ++halvings_;
    }
  }
  if (cfg_.source) {
    last_change_ = advance(n, d);
    return d;
  }
  const double e0 = energy_of(n);
  for (;;) {
    trial_ = n;
    const double change = advance(trial_, d);
    const double e1 = energy_of(trial_);
    if (e1 <= e0 + cfg_.energy_tol * std::abs(e0)) {
      n.swap(trial_);
      last_change_ = change;
      return d;
    }
    if (!cfg_.adaptive_guard) {
      std::ostringstream os;
      os << std::setprecision(17) << "stability guard: energy rose from " << e0 << " to " << e1
         << " with dt = " << d;
      throw SolverError(SolverError::Kind::stability_guard, os.str());
    }
    d *= 0.5;
    ++halvings_;
    if (d < dt * 1e-12) {
      throw SolverError(SolverError::Kind::stability_guard, "stability guard: energy keeps rising as dt -> 0");
    }
  }
}

DensityField step(const DensityField& state, const Params& p, const EvolutionConfig& cfg) {
  Stepper stepper(state.grid, p, cfg);
  std::vector<double> n = state.values;
  const double used = stepper.checked_step(n, cfg.dt);
  (void)used;
  return DensityField(state.grid, std::move(n));
}

RunResult run(const DensityField& n0, const Params& p, const EvolutionConfig& cfg,
              const DiagnosticsSink& sink) {
  if (!n0.all_finite()) throw InvalidArgument("initial density must be finite");
  Stepper stepper(n0.grid, p, cfg);
  RunResult res{.final_state = n0, .snapshots = {}, .diagnostics = {}};
  std::vector<double> n = n0.values;
  std::vector<double> times = cfg.snapshot_times;
  std::sort(times.begin(), times.end());
  std::size_t next_snap = 0;

  auto record = [&](double t, double dt_used) {
    res.diagnostics.push_back(diagnose(DensityField(n0.grid, n), p, t, dt_used));
    if (sink) sink(res.diagnostics.back());
  };
  auto take_snapshots = [&](double t) {
    while (next_snap < times.size() && t >= times[next_snap] * (1.0 - 1e-12)) {
      res.snapshots.push_back({t, DensityField(n0.grid, n)});
      ++next_snap;
    }
  };

  record(0.0, 0.0);
  take_snapshots(0.0);
  double t = 0.0;
  double dt_used = 0.0;
  std::size_t quiet = 0;
  bool recorded_last = true;
  const double t_stop = cfg.t_end * (1.0 - 1e-12);
  while (t < t_stop) {
    const double d = std::min(cfg.dt, cfg.t_end - t);
    try {
      dt_used = stepper.checked_step(n, d);
    } catch (const SolverError& e) {
      std::ostringstream os;
      os << "step " << res.steps + 1 << " (t = " << t << "): " << e.what();
      throw SolverError(e.kind(), os.str());
    }
    t += dt_used;
    ++res.steps;
    res.last_rate = stepper.last_change() / dt_used;
    quiet = res.last_rate < cfg.stall_tol ? quiet + 1 : 0;
    recorded_last = res.steps % cfg.output_every == 0;
    if (recorded_last) record(t, dt_used);
    take_snapshots(t);
    if (cfg.stop_on_stall && quiet >= cfg.stall_checks) {
      res.stalled = true;
      break;
    }
  }
  if (!recorded_last) record(t, dt_used);
  res.t = t;
  res.halvings = stepper.halvings();
  res.final_state = DensityField(n0.grid, std::move(n));
  return res;
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "truncated_arctan") return InitialKind::truncated_arctan;
  if (name == "gaussian_bump") return InitialKind::gaussian_bump;
  if (name == "constant") return InitialKind::constant;
  throw InvalidArgument("unknown initial condition '" + name + "'");
}

const char* to_string(InitialKind kind) noexcept {
  switch (kind) {
    case InitialKind::truncated_arctan: return "truncated_arctan";
    case InitialKind::gaussian_bump: return "gaussian_bump";
    case InitialKind::constant: return "constant";
  }
  return "?";
}

DensityField make_initial(InitialKind kind, const RadialGrid& grid, const InitialShape& s) {
  if (!std::isfinite(s.amplitude) || s.amplitude < 0.0) {
    throw InvalidArgument("initial amplitude must be finite and nonnegative");
  }
  DensityField n = DensityField::constant(grid, 0.0);
  if (kind == InitialKind::constant) {
    std::fill(n.values.begin(), n.values.end(), s.amplitude);
    return n;
  }
  if (!(s.width > 0.0) || !std::isfinite(s.width)) throw InvalidArgument("initial width must be positive");
  if (!(s.center >= 0.0) || !std::isfinite(s.center)) throw InvalidArgument("initial center must be nonnegative");
  if (kind == InitialKind::truncated_arctan) {
    if (!(s.center > 0.0)) throw InvalidArgument("arctan interface radius must be positive");
    auto g = [&](double r) { return std::atan((s.center - r) / s.width) + std::atan((s.center + r) / s.width); };
    const double r_t = s.center + 5.0 * s.width;
    const double g_t = g(r_t);
    const double scale = g(0.0) - g_t;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      n[i] = s.amplitude * std::max(0.0, g(grid.node(i)) - g_t) / scale;
    }
    return n;
  }
  const double c = s.center / s.width;
  const double norm = 1.0 + std::exp(-4.0 * c * c);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i) / s.width;
    n[i] = s.amplitude * (std::exp(-(x - c) * (x - c)) + std::exp(-(x + c) * (x + c))) / norm;
  }
  return n;
}

void write_snapshot_csv(std::ostream& os, const DensityField& n, const Params& p) {
  const DensityField mu = chemical_potential(n, p);
  const PressureLaw law(p.gamma);
  os << std::setprecision(17);
  os << "r,n,p,mu\n";
  for (std::size_t i = 0; i < n.size(); ++i) {
    os << n.grid.node(i) << ',' << n[i] << ',' << law(n[i]) << ',' << mu[i] << '\n';
  }
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << std::setprecision(17);
  os << "t,mass,energy,entropy,min_n,max_n,dt_used\n";
  for (const auto& r : rows) {
    os << r.t << ',' << r.mass << ',' << r.energy << ',' << r.entropy << ',' << r.min_n << ','
       << r.max_n << ',' << r.dt_used << '\n';
  }
}

}  // namespace chradial
