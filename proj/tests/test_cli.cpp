#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "chradial/cli.hpp"

using namespace chradial;
using namespace chradial::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("chradial_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

int run_exe(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + CHRADIAL_EXE + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config text, comments and overrides") {
  const RunConfig c = parse_config_text(Subcommand::stationary,
                                        "# a stationary run\n"
                                        "gamma = 6   # stiffer\n"
                                        "\n"
                                        "delta=0.02\n",
                                        {{"mass", "0.5"}, {"gamma", "8"}});
  CHECK(c.params.gamma == 8.0);
  CHECK(c.params.delta == 0.02);
  CHECK(c.params.mass == 0.5);
  CHECK(c.subcommand == Subcommand::stationary);
}

TEST_CASE("config errors name the line") {
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::limit, "gamma = 4\nfoo = 1\n"); }),
             Catch::Matchers::ContainsSubstring(":2:") && Catch::Matchers::ContainsSubstring("unknown key 'foo'"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::limit, "delta = abc\n"); }),
             Catch::Matchers::ContainsSubstring(":1:") && Catch::Matchers::ContainsSubstring("delta"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::limit, "just words\n"); }),
             Catch::Matchers::ContainsSubstring("expected key = value"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::limit, "gamma = 1\n"); }),
             Catch::Matchers::ContainsSubstring("gamma must exceed 1"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::limit, "", {{"n_nodes", "-3"}}); }),
             Catch::Matchers::ContainsSubstring("n_nodes"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::verify, "criteria = AC1,AC99\n"); }),
             Catch::Matchers::ContainsSubstring("AC99"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::stationary, "potential = none\n"); }),
             Catch::Matchers::ContainsSubstring("strictly increasing"));
  CHECK_THAT(error_of([] { parse_config_text(Subcommand::limit, "subcommand = evolve\n"); }),
             Catch::Matchers::ContainsSubstring("not 'limit'"));
}

TEST_CASE("resolved config round-trips for every subcommand") {
  for (Subcommand s : {Subcommand::evolve, Subcommand::stationary, Subcommand::limit, Subcommand::general,
                       Subcommand::sweep, Subcommand::verify}) {
    RunConfig c = default_config(s);
    apply_setting(c, "delta", "0.012345678901234567");
    apply_setting(c, "gammas", "3.5,7");
    apply_setting(c, "snapshot_times", "0,0.1,0.30000000000000004");
    c.validate();
    const RunConfig back = parse_config_text(s, to_config_text(c));
    CHECK(back == c);
    CHECK(back.params.delta == c.params.delta);
    CHECK(back.evolution.snapshot_times == c.evolution.snapshot_times);
  }
  // every key appears exactly once
  const auto pairs = default_config(Subcommand::evolve).to_pairs();
  CHECK(pairs.size() == config_keys().size() + 1);
}

TEST_CASE("eps=auto and potential keys") {
  RunConfig c = parse_config_text(Subcommand::evolve, "");
  CHECK(c.eps_auto);
  CHECK(c.potential == "none");
  c = parse_config_text(Subcommand::evolve, "eps = 0.05\npotential = r^4\n");
  CHECK_FALSE(c.eps_auto);
  CHECK(c.params.eps == 0.05);
  CHECK(c.params.potential.name() == "r^4");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run_exe("limit --out " + (dir / "ok").string()) == 0);
  CHECK(run_exe("limit --out " + (dir / "bad").string() + " --nonsense 1") == 2);
  CHECK(run_exe("limit --out " + (dir / "bad").string() + " --gamma 0.5") == 2);
  CHECK(run_exe("nosuch") == 2);
  CHECK(run_exe("limit --config /nonexistent/file.cfg --out " + (dir / "bad").string()) == 2);
  CHECK(run_exe("limit --out " + (dir / "infeasible").string() + " --mass 0.05") == 3);
  CHECK(run_exe("sweep --out " + (dir / "threads").string(), "CHRADIAL_THREADS=zero") == 2);

  // a reported solver failure still leaves a manifest
  const auto m = nlohmann::json::parse(slurp(dir / "infeasible" / "manifest.json"));
  CHECK(m["status"] == "solver_error");
  CHECK(m["error"].get<std::string>().find("infeasible") != std::string::npos);
}

TEST_CASE("manifest lists every emitted file with its size") {
  const fs::path dir = scratch("manifest");
  REQUIRE(run_exe("evolve --out " + dir.string() +
                  " --t_end 0.002 --snapshot_times 0,0.001,0.002 --output_every 5000") == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["version"] == CHRADIAL_VERSION);
  CHECK(m["status"] == "ok");
  CHECK(m["duration_seconds"].get<double>() >= 0.0);
  CHECK(m["convergence"].contains("steps"));
  std::set<std::string> listed;
  for (const auto& f : m["files"]) {
    const std::string name = f["name"];
    listed.insert(name);
    CHECK(fs::file_size(dir / name) == f["bytes"].get<std::uintmax_t>());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name != "manifest.json") CHECK(listed.count(name) == 1);
  }
  for (const char* f : {"snapshot_0.csv", "snapshot_1.csv", "snapshot_2.csv", "final.csv", "diagnostics.csv",
                        "plot_evolution.gp", "config.resolved"}) {
    CHECK(listed.count(f) == 1);
  }

  // the echoed parameters parse back to the same config
  std::string text;
  for (const auto& [k, v] : m["config"].items()) text += k + " = " + v.get<std::string>() + "\n";
  const RunConfig from_manifest = parse_config_text(Subcommand::evolve, text);
  const RunConfig from_resolved = parse_config(Subcommand::evolve, dir / "config.resolved", {});
  CHECK(from_manifest == from_resolved);
  CHECK(from_resolved.evolution.t_end == 0.002);
}

TEST_CASE("identical configs give byte-identical csv files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string args = " --t_end 0.002 --snapshot_times 0.001 --output_every 1000";
  REQUIRE(run_exe("evolve --out " + a.string() + args) == 0);
  REQUIRE(run_exe("evolve --config " + (a / "config.resolved").string() + " --out " + b.string()) == 0);
  for (const char* f : {"snapshot_0.csv", "final.csv", "diagnostics.csv"}) CHECK(slurp(a / f) == slurp(b / f));

  const fs::path s1 = scratch("sweep_1"), s3 = scratch("sweep_3");
  const std::string sweep = " --n_nodes 300 --gammas 10,50 --deltas 1e-4,1e-6";
  REQUIRE(run_exe("sweep --out " + s1.string() + sweep, "CHRADIAL_THREADS=1") == 0);
  REQUIRE(run_exe("sweep --out " + s3.string() + sweep, "CHRADIAL_THREADS=3") == 0);
  CHECK(slurp(s1 / "gamma_sweep.csv") == slurp(s3 / "gamma_sweep.csv"));
  CHECK(slurp(s1 / "jump_ratio.csv") == slurp(s3 / "jump_ratio.csv"));
}

TEST_CASE("stationary, limit and general outputs") {
  const fs::path dir = scratch("outputs");
  REQUIRE(run_exe("stationary --out " + (dir / "st").string() + " --n_nodes 400") == 0);
  const std::string summary = slurp(dir / "st" / "summary.csv");
  CHECK(summary.rfind("R,lambda,mass,residual_neumann", 0) == 0);
  CHECK(slurp(dir / "st" / "profile.csv").rfind("r,n,p,mu\n", 0) == 0);

  REQUIRE(run_exe("limit --out " + (dir / "lim").string() + " --mass 0.4 --delta 0.01") == 0);
  std::istringstream lim(slurp(dir / "lim" / "limit.csv"));
  std::string header, row;
  std::getline(lim, header);
  std::getline(lim, row);
  CHECK(row.rfind("1.0939120962043", 0) == 0);

  REQUIRE(run_exe("general --out " + (dir / "gen").string() + " --potential 'exp(r)-1' --deltas 1e-6,10") == 0);
  const std::string gen = slurp(dir / "gen" / "general.csv");
  CHECK(gen.find("infeasible") != std::string::npos);
}

namespace {

std::vector<std::string> csv_row(const fs::path& file, std::size_t index) {
  std::istringstream in(slurp(file));
  std::string line;
  for (std::size_t k = 0; k <= index; ++k) std::getline(in, line);
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("limit jump equals lambda_c and general agrees with limit") {
  const fs::path dir = scratch("cross");
  REQUIRE(run_exe("limit --out " + (dir / "lim").string() + " --radius 1 --delta 1e-4") == 0);
  REQUIRE(run_exe("general --out " + (dir / "gen").string() + " --radius 1 --deltas 1e-4") == 0);
  const auto lim = csv_row(dir / "lim" / "limit.csv", 1);  // R,R0,lambda_c,x_c,jump,...
  const auto gen = csv_row(dir / "gen" / "general.csv", 1);  // delta,tau,R0,lambda,...
  CHECK(lim[4] == lim[2]);
  CHECK_THAT(std::stod(gen[3]), Catch::Matchers::WithinAbs(std::stod(lim[2]), 1e-10));
  CHECK_THAT(std::stod(gen[2]), Catch::Matchers::WithinAbs(std::stod(lim[1]), 1e-10));
  CHECK_THAT(std::stod(gen[1]), Catch::Matchers::WithinAbs(std::stod(lim[3]), 1e-10));
}

TEST_CASE("sweep jump ratios lie in the bounded band") {
  const fs::path dir = scratch("ratios");
  REQUIRE(run_exe("sweep --out " + dir.string() + " --n_nodes 300 --gammas 10 --deltas 1e-3,1e-4,1e-5,1e-6,1e-7") ==
          0);
  int bounded = 0;
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto row = csv_row(dir / "jump_ratio.csv", k);  // R,delta,x_c,lambda_c,jump_asymptote,ratio,applies
    REQUIRE(row.size() == 7);
    if (row[6] != "true") continue;
    ++bounded;
    CHECK(std::stod(row[5]) >= 0.94);
    CHECK(std::stod(row[5]) <= 1.0);
  }
  CHECK(bounded == 3);
}

TEST_CASE("evolve edge cases") {
  const fs::path dir = scratch("edge");
  REQUIRE(run_exe("evolve --out " + (dir / "zero").string() +
                  " --initial constant --amplitude 0 --t_end 1e-4 --snapshot_times 0,1e-4 --stop_on_stall false") == 0);
  for (const char* f : {"snapshot_0.csv", "snapshot_1.csv", "final.csv"}) {
    REQUIRE(fs::exists(dir / "zero" / f));
    std::istringstream in(slurp(dir / "zero" / f));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string r, n;
      std::getline(ss, r, ',');
      std::getline(ss, n, ',');
      CHECK(n == "0");
      ++rows;
    }
    CHECK(rows == 300);
  }
  const auto m = nlohmann::json::parse(slurp(dir / "zero" / "manifest.json"));
  CHECK(m["non_normative"].size() == 4);

  CHECK(run_exe("evolve --out " + (dir / "guard").string() + " --dt 1e-3 --adaptive_guard false --t_end 0.01") == 3);
  const auto g = nlohmann::json::parse(slurp(dir / "guard" / "manifest.json"));
  CHECK(g["status"] == "solver_error");
  CHECK(g["error"].get<std::string>().find("stability") != std::string::npos);
}

TEST_CASE("verify runs a subset and fails on a corrupted tolerance") {
  const fs::path dir = scratch("verify");
  CHECK(run_exe("verify --out " + (dir / "good").string() + " --criteria AC3,AC4,AC6") == 0);
  const std::string good = slurp(dir / "good" / "verify.csv");
  CHECK(good.find("AC3,true") != std::string::npos);
  CHECK(good.find("AC1,") == std::string::npos);

  CHECK(run_exe("verify --out " + (dir / "bad").string() + " --criteria AC4 --tol.ac4_mass_rel 1e-30") == 1);
  CHECK(slurp(dir / "bad" / "verify.csv").find("AC4,false") != std::string::npos);
  const auto m = nlohmann::json::parse(slurp(dir / "bad" / "manifest.json"));
  CHECK(m["status"] == "failed");
  CHECK(m["convergence"]["failed"] == "AC4");
}
