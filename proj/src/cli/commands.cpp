#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chradial/cli.hpp"
#include "chradial/general_potential.hpp"
#include "chradial/stationary.hpp"

namespace chradial::cli {

namespace {

std::string num(double x) { return csv_number(x); }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

unsigned thread_count() {
  const char* env = std::getenv("CHRADIAL_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) {
    throw ConfigError("CHRADIAL_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  return static_cast<unsigned>(n);
}

std::string csv_text(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

std::string gnuplot_script(const std::vector<std::pair<std::string, double>>& panels) {
  std::ostringstream os;
  os << "# gnuplot -p plot_evolution.gp\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 1200,900\n"
     << "set output 'evolution.png'\n"
     << "set multiplot layout " << (panels.size() + 1) / 2 << ",2\n"
     << "set xlabel 'r'\n"
     << "set key top right\n";
  for (const auto& [file, t] : panels) {
    os << "set title 't = " << t << "'\n"
       << "plot '" << file << "' using 1:2 skip 1 with lines title 'n', \\\n"
       << "     '' using 1:3 skip 1 with lines title 'p'\n";
  }
  os << "unset multiplot\n";
  return os.str();
}

Summary cmd_evolve(const RunConfig& cfg, OutputDir& out) {
  Params p = cfg.params;
  const RadialGrid grid = build_grid(p.r_b, cfg.n_nodes);
  if (cfg.eps_auto) p.eps = grid.spacing();
  EvolutionConfig ec = cfg.evolution;
  if (cfg.growth) ec.source = cfg.growth_spec;

  const DensityField n0 = make_initial(cfg.initial, grid, cfg.shape);
  const RunResult res = run(n0, p, ec);

  std::vector<std::pair<std::string, double>> panels;
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    const std::string name = "snapshot_" + std::to_string(k) + ".csv";
    out.write(name, csv_text([&](std::ostream& os) { write_snapshot_csv(os, res.snapshots[k].n, p); }));
    if (panels.size() < 4) panels.emplace_back(name, res.snapshots[k].t);
  }
  out.write("final.csv", csv_text([&](std::ostream& os) { write_snapshot_csv(os, res.final_state, p); }));
  out.write("diagnostics.csv", csv_text([&](std::ostream& os) { write_diagnostics_csv(os, res.diagnostics); }));
  if (panels.empty()) panels.emplace_back("final.csv", res.t);
  out.write("plot_evolution.gp", gnuplot_script(panels));

  const double m0 = mass(n0, p);
  const double m1 = mass(res.final_state, p);
  Summary s{{"eps", num(p.eps)},
            {"steps", std::to_string(res.steps)},
            {"t_final", num(res.t)},
            {"stalled", res.stalled ? "true" : "false"},
            {"dt_halvings", std::to_string(res.halvings)},
            {"last_rate", num(res.last_rate)},
            {"mass_initial", num(m0)},
            {"mass_final", num(m1)}};
  if (!cfg.growth) s.emplace_back("mass_rel_drift", num(std::abs(m1 - m0) / m0));
  const auto [plo, phi] = interior_pressure_range(res.final_state, p.gamma);
  s.emplace_back("interior_pressure_min", num(plo));
  s.emplace_back("interior_pressure_max", num(phi));
  std::cout << "evolve: t = " << res.t << " after " << res.steps << " steps"
            << (res.stalled ? " (stalled)" : "") << ", mass " << m1 << "\n";
  return s;
}

Summary cmd_stationary(const RunConfig& cfg, OutputDir& out) {
  const Params& p = cfg.params;
  StationaryOptions opts;
  opts.n_nodes = cfg.n_nodes;
  const StationaryProfile prof = cfg.radius > 0.0 ? make_profile(find_lambda(cfg.radius, p, cfg.n_nodes, opts), p)
                                                  : find_radius_for_mass(p.mass, p, opts);
  Params out_params = p;
  out_params.eps = 0.0;
  const DensityField field = extend_to_domain(prof, std::max(p.r_b, prof.R), cfg.n_nodes);
  out.write("profile.csv", csv_text([&](std::ostream& os) { write_snapshot_csv(os, field, out_params); }));
  out.write("summary.csv", "R,lambda,mass,residual_neumann,gamma,delta,newton_iters,bisect_iters\n" + num(prof.R) +
                               "," + num(prof.lambda) + "," + num(prof.mass) + "," + num(prof.residual_neumann) +
                               "," + num(prof.gamma) + "," + num(prof.delta) + "," +
                               std::to_string(prof.newton_iters) + "," + std::to_string(prof.bisect_iters) + "\n");
  std::cout << "stationary: R = " << num(prof.R) << ", lambda = " << num(prof.lambda) << ", mass = " << num(prof.mass)
            << ", |n'(R)| = " << prof.residual_neumann << "\n";
  return {{"R", num(prof.R)},
          {"lambda", num(prof.lambda)},
          {"mass", num(prof.mass)},
          {"residual_neumann", num(prof.residual_neumann)},
          {"newton_iters", std::to_string(prof.newton_iters)},
          {"bisect_iters", std::to_string(prof.bisect_iters)},
          {"monotonicity_anomaly", prof.monotonicity_anomaly ? "true" : "false"}};
}

Summary cmd_limit(const RunConfig& cfg, OutputDir& out) {
  const double delta = cfg.params.delta;
  const IncompressibleProfile prof =
      cfg.radius > 0.0 ? profile_for_radius(cfg.radius, delta, std::max(cfg.r_out, cfg.radius), cfg.n_nodes)
                       : build_profile(cfg.params.mass, delta, cfg.r_out, cfg.n_nodes, cfg.feasibility);
  const double asym = jump_asymptotic(prof.R, delta);
  out.write("limit.csv", "R,R0,lambda_c,x_c,jump,mass,delta,jump_asymptote\n" + num(prof.R) + "," + num(prof.R0) +
                             "," + num(prof.lambda_c) + "," + num(prof.x_c) + "," + num(prof.jump) + "," +
                             num(prof.mass) + "," + num(delta) + "," + num(asym) + "\n");
  std::string rows = "r,n,p\n";
  for (std::size_t i = 0; i < prof.n_inc.size(); ++i) {
    rows += num(prof.n_inc.grid.node(i)) + "," + num(prof.n_inc[i]) + "," + num(prof.p_inc[i]) + "\n";
  }
  out.write("limit_profile.csv", rows);
  std::cout << "limit: R = " << num(prof.R) << ", x_c = " << num(prof.x_c) << ", lambda_c = " << num(prof.lambda_c)
            << "\n";
  return {{"R", num(prof.R)}, {"x_c", num(prof.x_c)}, {"lambda_c", num(prof.lambda_c)}, {"mass", num(prof.mass)}};
}

Summary cmd_general(const RunConfig& cfg, OutputDir& out) {
  const PotentialSpec& V = cfg.params.potential;
  std::string rows = "delta,tau,R0,lambda,lambda_asymptote,ratio,width_asymptote,error\n";
  std::size_t failed = 0;
  for (double d : cfg.deltas) {
    try {
      const GeneralSweepRow r = general_delta_sweep(cfg.radius, {d}, V).front();
      const JumpAsymptote a = jump_general_asymptote(cfg.radius, d, V);
      rows += num(d) + "," + num(r.tau) + "," + num(r.R0) + "," + num(r.lambda) + "," + num(r.lambda_asymptote) +
              "," + num(r.ratio) + "," + num(a.width) + ",\n";
    } catch (const SolverError& e) {
      ++failed;
      rows += num(d) + ",,,,,,," + quoted(std::string(to_string(e.kind())) + ": " + e.what()) + "\n";
    }
  }
  out.write("general.csv", rows);
  std::cout << "general: " << cfg.deltas.size() - failed << " of " << cfg.deltas.size() << " deltas solved for V = "
            << cfg.potential << "\n";
  return {{"potential", cfg.potential}, {"solved", std::to_string(cfg.deltas.size() - failed)},
          {"failed", std::to_string(failed)}};
}

Summary cmd_sweep(const RunConfig& cfg, OutputDir& out) {
  const Params& p = cfg.params;
  const GammaSweepReport rep = gamma_sweep(p.mass, p.delta, cfg.gammas, cfg.n_nodes, p, thread_count());
  std::string rows = "gamma,R_gamma,sup_err,R_err,p_at_R0,lambda_c,p_over_lambda_c,jump_asymptote,error\n";
  std::size_t failed = 0;
  for (const SweepRow& r : rep.rows) {
    if (r.error) {
      ++failed;
      rows += num(r.gamma) + ",,,,,,,," + quoted(*r.error) + "\n";
      continue;
    }
    rows += num(r.gamma) + "," + num(r.R_gamma) + "," + num(r.sup_err) + "," + num(r.R_err) + "," + num(r.p_at_R0) +
            "," + num(r.lambda_c) + "," + num(r.p_at_R0 / r.lambda_c) + "," + num(r.jump_asymptote) + ",\n";
  }
  out.write("gamma_sweep.csv", rows);

  const double R = cfg.radius > 0.0 ? cfg.radius : 1.0;
  std::string jr = "R,delta,x_c,lambda_c,jump_asymptote,ratio,lower_bound_applies\n";
  for (double d : cfg.deltas) {
    if (!(16.0 * d < R * R * R * R)) continue;
    const IncompressibleProfile lim = profile_for_radius(R, d, R, 16);
    const double asym = jump_asymptotic(R, d);
    const bool bounds = 6.0 * 6.0 * 6.0 * 6.0 * 8.0 * d < R * R * R * R;
    jr += num(R) + "," + num(d) + "," + num(lim.x_c) + "," + num(lim.lambda_c) + "," + num(asym) + "," +
          num(lim.lambda_c / asym) + "," + (bounds ? "true" : "false") + "\n";
  }
  out.write("jump_ratio.csv", jr);
  std::cout << "sweep: " << rep.rows.size() - failed << " of " << rep.rows.size() << " gammas solved\n";
  return {{"limit_R", num(rep.limit.R)}, {"limit_lambda_c", num(rep.limit.lambda_c)},
          {"solved", std::to_string(rep.rows.size() - failed)}, {"failed", std::to_string(failed)}};
}

Summary cmd_verify(const RunConfig& cfg, OutputDir& out, bool& all_passed) {
  const auto results = run_criteria(cfg.criteria, cfg.tolerances, &std::cout);
  std::string rows = "id,passed,seconds,title,detail\n";
  std::string failed;
  for (const auto& r : results) {
    rows += r.id + "," + (r.passed ? "true" : "false") + "," + num(r.seconds) + "," + quoted(r.title) + "," +
            quoted(r.detail) + "\n";
    if (!r.passed) failed += (failed.empty() ? "" : ",") + r.id;
  }
  out.write("verify.csv", rows);
  all_passed = failed.empty();
  if (!all_passed) std::cout << "failed criteria: " << failed << "\n";
  return {{"criteria_run", std::to_string(results.size())}, {"failed", failed}};
}

}  // namespace

int execute(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputDir out(cfg.output_dir);
  Summary summary;
  std::string status = "ok";
  std::string error;
  int code = 0;
  try {
    switch (cfg.subcommand) {
      case Subcommand::evolve: summary = cmd_evolve(cfg, out); break;
      case Subcommand::stationary: summary = cmd_stationary(cfg, out); break;
      case Subcommand::limit: summary = cmd_limit(cfg, out); break;
      case Subcommand::general: summary = cmd_general(cfg, out); break;
      case Subcommand::sweep: summary = cmd_sweep(cfg, out); break;
      case Subcommand::verify: {
        bool passed = false;
        summary = cmd_verify(cfg, out, passed);
        if (!passed) {
          status = "failed";
          code = 1;
        }
        break;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const SolverError& e) {
    status = "solver_error";
    error = std::string(to_string(e.kind())) + ": " + e.what();
    code = 3;
  } catch (const InvalidArgument& e) {
    status = "invalid_argument";
    error = e.what();
    code = 2;
  }
  if (!error.empty()) std::cerr << "chradial: " << error << "\n";
  out.write("config.resolved", to_config_text(cfg));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.write("manifest.json", manifest_json(cfg, out, seconds, summary, status, error));
  return code;
}

int main(int argc, const char* const* argv) {
  CLI::App app{"Radial degenerate Cahn-Hilliard solver: evolution, stationary states, incompressible limit"};
  app.set_version_flag("--version", CHRADIAL_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"evolve", "time-dependent run (diagnostics, snapshots, plot script)"},
      {"stationary", "stationary state of given mass or radius"},
      {"limit", "incompressible-limit profile"},
      {"general", "limit quantities for a general potential over a delta list"},
      {"sweep", "gamma sweep towards the limit and jump-ratio table"},
      {"verify", "run acceptance criteria"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", config_path, "key = value config file");
    s->add_option("--out", out_dir, "output directory");
    s->allow_extras();
    s->footer("Any config key may be overridden with --key value or --key=value.");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* s = app.get_subcommands().front();
    const Subcommand sub = parse_subcommand(s->get_name());
    std::vector<std::pair<std::string, std::string>> overrides;
    const std::vector<std::string> rest = s->remaining();
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const std::string& a = rest[i];
      if (a.rfind("--", 0) != 0 || a.size() < 3) throw ConfigError("unexpected argument '" + a + "'");
      const auto eq = a.find('=');
      if (eq != std::string::npos) {
        overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
      } else {
        if (i + 1 >= rest.size()) throw ConfigError("missing value for '" + a + "'");
        overrides.emplace_back(a.substr(2), rest[++i]);
      }
    }
    if (!out_dir.empty()) overrides.emplace_back("out", out_dir);
    const RunConfig cfg = parse_config(sub, config_path, overrides);
    return execute(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "chradial: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "chradial: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace chradial::cli
