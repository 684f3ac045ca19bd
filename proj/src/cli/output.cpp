#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "chradial/cli.hpp"

namespace chradial::cli {

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }
  for (auto& f : files_) {
    if (f.first == name) {
      f.second = content.size();
      return;
    }
  }
  files_.emplace_back(name, content.size());
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string manifest_json(const RunConfig& cfg, const OutputDir& out, double seconds, const Summary& summary,
                          const std::string& status, const std::string& error) {
  nlohmann::ordered_json j;
  j["program"] = "chradial";
  j["version"] = CHRADIAL_VERSION;
  j["subcommand"] = to_string(cfg.subcommand);
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["duration_seconds"] = seconds;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.to_pairs()) config[k] = v;
  j["config"] = config;
  if (cfg.subcommand == Subcommand::evolve) {
    // the growth run's initial shape and eps are chosen, not prescribed
    j["non_normative"] = {"amplitude", "center", "width", "eps"};
  }
  nlohmann::ordered_json conv = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary) conv[k] = v;
  j["convergence"] = conv;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [name, bytes] : out.files()) files.push_back({{"name", name}, {"bytes", bytes}});
  j["files"] = files;
  return j.dump(2) + "\n";
}

}  // namespace chradial::cli
