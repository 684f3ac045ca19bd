#pragma once

// Command-line front end.  A run is described by a RunConfig resolved from
// defaults, an optional key=value file and `--key value` overrides; every
// resolved key is echoed into the run manifest and into config.resolved,
// which parses back to an equal config.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chradial/errors.hpp"
#include "chradial/evolution.hpp"
#include "chradial/limit.hpp"
#include "chradial/model.hpp"
#include "chradial/verify.hpp"

namespace chradial::cli {

enum class Subcommand { evolve, stationary, limit, general, sweep, verify };

Subcommand parse_subcommand(const std::string& name);
const char* to_string(Subcommand s) noexcept;

/// Malformed or invalid configuration (exit status 2).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::verify;
  std::filesystem::path output_dir = "out";

  Params params;
  std::string potential = "r^2";
  bool eps_auto = false;  // eps = grid spacing
  std::size_t n_nodes = 1000;
  double radius = 0.0;  // > 0 fixes the support radius instead of the mass

  // evolve
  EvolutionConfig evolution;
  bool growth = false;
  GrowthSpec growth_spec;
  InitialKind initial = InitialKind::truncated_arctan;
  InitialShape shape{0.8, 2.0, 0.2};

  // limit / sweep / general
  MassFeasibility feasibility = MassFeasibility::monotone_branch;
  double r_out = 0.0;  // 0: the support radius
  std::vector<double> gammas{10.0, 50.0, 250.0};
  std::vector<double> deltas{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};

  // verify
  std::vector<std::string> criteria;
  VerifyTolerances tolerances;

  /// Every key with its value, in a fixed order; numbers use the shortest
  /// text that parses back to the same double.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
  bool operator==(const RunConfig& other) const { return to_pairs() == other.to_pairs(); }

  /// Module preconditions; throws ConfigError naming the field.
  void validate() const;
};

/// Defaults for a subcommand (evolve defaults reproduce the growth run).
RunConfig default_config(Subcommand sub);

/// All recognized keys.
std::vector<std::string> config_keys();

/// Applies one key=value; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses line-oriented key=value text ('#' starts a comment).  Errors name
/// the source and line number.
void apply_text(RunConfig& cfg, const std::string& text, const std::string& source = "config");

/// Defaults, then the file (if any), then overrides in order; validated.
RunConfig parse_config(Subcommand sub, const std::filesystem::path& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides);
RunConfig parse_config_text(Subcommand sub, const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

std::string to_config_text(const RunConfig& cfg);

/// Files written by a run, in order, with their sizes.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const noexcept { return dir_; }
  void write(const std::string& name, const std::string& content);
  const std::vector<std::pair<std::string, std::uintmax_t>>& files() const noexcept { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::uintmax_t>> files_;
};

/// Free-form convergence facts recorded in the manifest.
using Summary = std::vector<std::pair<std::string, std::string>>;

std::string manifest_json(const RunConfig& cfg, const OutputDir& out, double seconds, const Summary& summary,
                          const std::string& status, const std::string& error);

std::string csv_number(double x);

/// Runs a resolved config; writes CSVs, the manifest and config.resolved.
/// Returns the exit status (0 ok, 1 verification failed, 3 solver error).
int execute(const RunConfig& cfg);

/// Full command line handling; returns the process exit status.
int main(int argc, const char* const* argv);

}  // namespace chradial::cli
