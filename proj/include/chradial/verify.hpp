#pragma once

// Acceptance checks shared by `chradial verify` and the acceptance test.
// Each criterion is deterministic and reports a one-line detail string.

#include <ostream>
#include <string>
#include <vector>

#include "chradial/evolution.hpp"
#include "chradial/model.hpp"

namespace chradial {

struct VerifyTolerances {
  double ac1_nodal = 1e-6;
  double ac1_seconds = 1.0;
  double ac2_slope = 1e-8;
  double ac2_seconds = 10.0;
  double ac3_oracle = 1e-12;
  double ac4_mass_rel = 1e-6;
  double ac5_ratio_lo = 0.9410;
  double ac5_ratio_hi = 1.0;
  double ac6_lambda = 1e-10;
  double ac7_ratio_lo = 0.9;
  double ac7_ratio_hi = 1.1;
  double ac7_seconds = 5.0;
  double ac8_mass_rel = 1e-12;
  double ac8_energy_rel = 1e-8;
  double ac8_seconds = 30.0;
  double ac9_h2_factor = 5.0;
  double ac9_seconds = 300.0;
  double ac10_band_lo = 0.5;
  double ac10_band_hi = 1.5;
  double ac11_p_lo = 0.9;
  double ac11_p_hi = 1.0;
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// "AC1" ... "AC11".
std::vector<std::string> criterion_ids();
std::string criterion_title(const std::string& id);

CriterionResult run_criterion(const std::string& id, const VerifyTolerances& tol);

/// Runs the listed criteria (all when empty), printing one line each to `log`
/// if given.
std::vector<CriterionResult> run_criteria(const std::vector<std::string>& ids, const VerifyTolerances& tol,
                                          std::ostream* log = nullptr);

std::string format_result(const CriterionResult& r);

// Settings of the growth run (domain [0,10], 300 nodes, dt = 1e-7,
// G(p) = 10(1 - p), no confinement, truncated-arctan start).
struct GrowthReplica {
  Params params;
  EvolutionConfig config;
  InitialShape shape{0.8, 2.0, 0.2};
  double r_b = 10.0;
  std::size_t n_nodes = 300;
};
GrowthReplica growth_replica();

/// min/max of the pressure over r <= front/2, where the front is the last
/// node with n > 1/2.  Returns {nan, nan} if there is no such node.
std::pair<double, double> interior_pressure_range(const DensityField& n, double gamma);

}  // namespace chradial
