#pragma once

// Explicit time stepping of the regularized radial flow
//
//   d/dt((r+eps) n) = d/dr((r+eps) B_eps(n) d/dr(mu + V)) [+ (r+eps) n G(p)],
//   mu = max(0,n)^gamma - delta/(r+eps) d/dr((r+eps) dn/dr),
//
// in conservative finite-volume form.  Node i owns the control volume
// A_i = int_{cell_i} (r+eps) dr, so the conserved mass is sum_i A_i n_i and
// the discrete energy
//
//   E_h = sum_i A_i (P(n_i) + n_i V_i) + delta/2 sum_f h (r_f+eps) ((n_{i+1}-n_i)/h)^2
//
// is a Lyapunov function of the semi-discrete scheme: mu_i + V_i is exactly
// (1/A_i) dE_h/dn_i.

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chradial/grid.hpp"
#include "chradial/model.hpp"

namespace chradial {

/// G(p) = rate * (p_h - p).
struct GrowthSpec {
  double rate = 10.0;
  double homeostatic_pressure = 1.0;

  double operator()(double p) const noexcept { return rate * (homeostatic_pressure - p); }
};

enum class FaceAverage { arithmetic, harmonic };

struct EvolutionConfig {
  double dt = 1e-7;
  double t_end = 1.0;
  std::optional<GrowthSpec> source;
  std::size_t output_every = 1000;
  bool adaptive_guard = true;
  FaceAverage face_average = FaceAverage::arithmetic;
  /// Stop once max|n^{k+1} - n^k|/dt < stall_tol for stall_checks steps in a row.
  bool stop_on_stall = true;
  double stall_tol = 1e-7;
  std::size_t stall_checks = 100;
  /// Largest relative energy increase tolerated in a sourceless step.
  double energy_tol = 1e-6;
  /// Snapshots are taken at the first step reaching each of these times.
  std::vector<double> snapshot_times;

  void validate() const;
};

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double min_n = 0.0;
  double max_n = 0.0;
  double dt_used = 0.0;
};

double mass(const DensityField& n, const Params& p);
double energy(const DensityField& n, const Params& p);
/// sum_i A_i phi_eps(n_i); needs eps in (0,1).
double entropy_total(const DensityField& n, const Params& p);
DiagnosticsRow diagnose(const DensityField& n, const Params& p, double t, double dt_used);

/// Largest dt the explicit scheme is guaranteed to tolerate at state n: the
/// reciprocal of a Gershgorin bound on the linearized operator,
/// B_max kappa (delta kappa + P'_max) with kappa = max row sum of the
/// discrete Laplacian.
double stability_limit(const DensityField& n, const Params& p);

/// Owns the work arrays for repeated steps on one grid.
class Stepper {
 public:
  Stepper(const RadialGrid& grid, Params p, EvolutionConfig cfg);

  /// Advances `n` in place by dt.  Returns the largest nodal change.
  /// Throws SolverError(blow_up) if a value becomes non-finite or exceeds 1e6.
  double advance(std::vector<double>& n, double dt);

  /// One checked step from `n`: enforces the stability limit (halving dt when
  /// adaptive_guard is on, throwing stability_guard otherwise) and, without a
  /// source, rejects energy increases above energy_tol.  Returns dt used.
  double checked_step(std::vector<double>& n, double dt);

  /// Largest nodal change of the last accepted checked_step.
  double last_change() const noexcept { return last_change_; }

  double energy_of(const std::vector<double>& n) const;
  const RadialGrid& grid() const noexcept { return grid_; }
  std::size_t halvings() const noexcept { return halvings_; }

 private:
  RadialGrid grid_;
  Params p_;
  EvolutionConfig cfg_;
  PressureLaw law_;
  std::vector<double> area_;     // control volumes
  std::vector<double> weight_;   // (r_f + eps) at faces
  std::vector<double> V_;
  std::vector<double> phi_;      // mu + V
  std::vector<double> press_;
  std::vector<double> flux_;
  std::vector<double> trial_;
  double kappa_ = 0.0;
  double last_change_ = 0.0;
  std::size_t halvings_ = 0;
};

/// Single step of size cfg.dt.
DensityField step(const DensityField& state, const Params& p, const EvolutionConfig& cfg);

struct Snapshot {
  double t;
  DensityField n;
};

struct RunResult {
  DensityField final_state;
  double t = 0.0;
  std::size_t steps = 0;
  bool stalled = false;
  std::size_t halvings = 0;
  double last_rate = 0.0;  // max|dn|/dt of the last step
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
};

using DiagnosticsSink = std::function<void(const DiagnosticsRow&)>;

/// Steps to t_end (or until stalled).  Diagnostics are recorded at t = 0,
/// every output_every steps and at the end; each row is also passed to `sink`.
RunResult run(const DensityField& n0, const Params& p, const EvolutionConfig& cfg,
              const DiagnosticsSink& sink = {});

enum class InitialKind { truncated_arctan, gaussian_bump, constant };

struct InitialShape {
  double amplitude = 1.0;
  double center = 2.0;  // interface radius (arctan) or bump centre
  double width = 0.2;
};

InitialKind parse_initial_kind(const std::string& name);
const char* to_string(InitialKind kind) noexcept;

/// truncated_arctan: A (g(r) - g(r_t))_+ / (g(0) - g(r_t)) with
/// g(r) = atan((c-r)/w) + atan((c+r)/w) and r_t = c + 5w; flat at r = 0,
/// nonincreasing, exactly zero beyond r_t.
/// gaussian_bump: A exp(-((r-c)/w)^2) with the symmetric image at -c so the
/// profile is flat at the origin.  constant: A everywhere.
DensityField make_initial(InitialKind kind, const RadialGrid& grid, const InitialShape& shape);

void write_snapshot_csv(std::ostream& os, const DensityField& n, const Params& p);
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);

}  // namespace chradial
