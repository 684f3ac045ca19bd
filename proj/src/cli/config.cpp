#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "chradial/cli.hpp"
#include "chradial/general_potential.hpp"

namespace chradial::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest representation that parses back to the same double.
std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double x = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::size_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::vector<std::string> items;
  for (double x : xs) items.push_back(format_double(x));
  return join(items);
}

PotentialSpec make_potential(const std::string& name) {
  if (name == "none") return PotentialSpec::none();
  try {
    return test_potential(name);
  } catch (const InvalidArgument&) {
    std::string known;
    for (const auto& n : test_potential_names()) known += n + ", ";
    throw ConfigError("potential: unknown '" + name + "' (known: " + known + "none)");
  }
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Accessor lambdas are generic so they serve both the setter and the getter.
template <class Ref>
Key number(std::string name, Ref ref) {
  return {name, [ref, name](RunConfig& c, const std::string& v) { ref(c) = parse_double(name, v); },
          [ref](const RunConfig& c) { return format_double(ref(c)); }};
}

template <class Ref>
Key count(std::string name, Ref ref) {
  return {name, [ref, name](RunConfig& c, const std::string& v) { ref(c) = parse_count(name, v); },
          [ref](const RunConfig& c) { return std::to_string(ref(c)); }};
}

template <class Ref>
Key flag(std::string name, Ref ref) {
  return {name, [ref, name](RunConfig& c, const std::string& v) { ref(c) = parse_bool(name, v); },
          [ref](const RunConfig& c) { return std::string(ref(c) ? "true" : "false"); }};
}

template <class Ref>
Key list(std::string name, Ref ref) {
  return {name, [ref, name](RunConfig& c, const std::string& v) { ref(c) = parse_list(name, v); },
          [ref](const RunConfig& c) { return join(ref(c)); }};
}

#define REF(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back(number("gamma", REF(params.gamma)));
    k.push_back(number("delta", REF(params.delta)));
    k.push_back({"eps",
                 [](RunConfig& c, const std::string& v) {
                   if (trim(v) == "auto") {
                     c.eps_auto = true;
                   } else {
                     c.eps_auto = false;
                     c.params.eps = parse_double("eps", v);
                   }
                 },
                 [](const RunConfig& c) { return c.eps_auto ? std::string("auto") : format_double(c.params.eps); }});
    k.push_back(number("mass", REF(params.mass)));
    k.push_back(number("r_b", REF(params.r_b)));
    k.push_back({"potential",
                 [](RunConfig& c, const std::string& v) {
                   c.params.potential = make_potential(trim(v));
                   c.potential = trim(v);
                 },
                 [](const RunConfig& c) { return c.potential; }});
    k.push_back(number("tol_root", REF(params.tol_root)));
    k.push_back(number("tol_newton", REF(params.tol_newton)));
    k.push_back(count("n_nodes", REF(n_nodes)));
    k.push_back(number("radius", REF(radius)));

    k.push_back(number("dt", REF(evolution.dt)));
    k.push_back(number("t_end", REF(evolution.t_end)));
    k.push_back(count("output_every", REF(evolution.output_every)));
    k.push_back(flag("adaptive_guard", REF(evolution.adaptive_guard)));
    k.push_back({"face_average",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   if (s == "arithmetic") {
                     c.evolution.face_average = FaceAverage::arithmetic;
                   } else if (s == "harmonic") {
                     c.evolution.face_average = FaceAverage::harmonic;
                   } else {
                     throw ConfigError("face_average: expected arithmetic or harmonic, got '" + v + "'");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.evolution.face_average == FaceAverage::harmonic ? "harmonic" : "arithmetic");
                 }});
    k.push_back(flag("stop_on_stall", REF(evolution.stop_on_stall)));
    k.push_back(number("stall_tol", REF(evolution.stall_tol)));
    k.push_back(count("stall_checks", REF(evolution.stall_checks)));
    k.push_back(number("energy_tol", REF(evolution.energy_tol)));
    k.push_back(list("snapshot_times", REF(evolution.snapshot_times)));
    k.push_back(flag("growth", REF(growth)));
    k.push_back(number("growth_rate", REF(growth_spec.rate)));
    k.push_back(number("homeostatic_pressure", REF(growth_spec.homeostatic_pressure)));
    k.push_back({"initial",
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.initial = parse_initial_kind(trim(v));
                   } catch (const InvalidArgument& e) {
                     throw ConfigError(std::string("initial: ") + e.what());
                   }
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.initial)); }});
    k.push_back(number("amplitude", REF(shape.amplitude)));
    k.push_back(number("center", REF(shape.center)));
    k.push_back(number("width", REF(shape.width)));

    k.push_back({"feasibility",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   if (s == "monotone_branch") {
                     c.feasibility = MassFeasibility::monotone_branch;
                   } else if (s == "existence_bound") {
                     c.feasibility = MassFeasibility::existence_bound;
                   } else {
                     throw ConfigError("feasibility: expected monotone_branch or existence_bound, got '" + v + "'");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.feasibility == MassFeasibility::existence_bound ? "existence_bound"
                                                                                    : "monotone_branch");
                 }});
    k.push_back(number("r_out", REF(r_out)));
    k.push_back(list("gammas", REF(gammas)));
    k.push_back(list("deltas", REF(deltas)));

    k.push_back({"criteria",
                 [](RunConfig& c, const std::string& v) {
                   c.criteria = split_list(v);
                   const auto ids = criterion_ids();
                   for (const auto& id : c.criteria) {
                     if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
                       throw ConfigError("criteria: unknown criterion '" + id + "'");
                     }
                   }
                 },
                 [](const RunConfig& c) { return join(c.criteria); }});
    k.push_back(number("tol.ac1_nodal", REF(tolerances.ac1_nodal)));
    k.push_back(number("tol.ac1_seconds", REF(tolerances.ac1_seconds)));
    k.push_back(number("tol.ac2_slope", REF(tolerances.ac2_slope)));
    k.push_back(number("tol.ac2_seconds", REF(tolerances.ac2_seconds)));
    k.push_back(number("tol.ac3_oracle", REF(tolerances.ac3_oracle)));
    k.push_back(number("tol.ac4_mass_rel", REF(tolerances.ac4_mass_rel)));
    k.push_back(number("tol.ac5_ratio_lo", REF(tolerances.ac5_ratio_lo)));
    k.push_back(number("tol.ac5_ratio_hi", REF(tolerances.ac5_ratio_hi)));
    k.push_back(number("tol.ac6_lambda", REF(tolerances.ac6_lambda)));
    k.push_back(number("tol.ac7_ratio_lo", REF(tolerances.ac7_ratio_lo)));
    k.push_back(number("tol.ac7_ratio_hi", REF(tolerances.ac7_ratio_hi)));
    k.push_back(number("tol.ac7_seconds", REF(tolerances.ac7_seconds)));
    k.push_back(number("tol.ac8_mass_rel", REF(tolerances.ac8_mass_rel)));
    k.push_back(number("tol.ac8_energy_rel", REF(tolerances.ac8_energy_rel)));
    k.push_back(number("tol.ac8_seconds", REF(tolerances.ac8_seconds)));
    k.push_back(number("tol.ac9_h2_factor", REF(tolerances.ac9_h2_factor)));
    k.push_back(number("tol.ac9_seconds", REF(tolerances.ac9_seconds)));
    k.push_back(number("tol.ac10_band_lo", REF(tolerances.ac10_band_lo)));
    k.push_back(number("tol.ac10_band_hi", REF(tolerances.ac10_band_hi)));
    k.push_back(number("tol.ac11_p_lo", REF(tolerances.ac11_p_lo)));
    k.push_back(number("tol.ac11_p_hi", REF(tolerances.ac11_p_hi)));
    k.push_back({"out", [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
                 [](const RunConfig& c) { return c.output_dir.string(); }});
    return k;
  }();
  return keys;
}

#undef REF

const Key* find_key(const std::string& name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

Subcommand parse_subcommand(const std::string& name) {
  if (name == "evolve") return Subcommand::evolve;
  if (name == "stationary") return Subcommand::stationary;
  if (name == "limit") return Subcommand::limit;
  if (name == "general") return Subcommand::general;
  if (name == "sweep") return Subcommand::sweep;
  if (name == "verify") return Subcommand::verify;
  throw ConfigError("unknown subcommand '" + name + "'");
}

const char* to_string(Subcommand s) noexcept {
  switch (s) {
    case Subcommand::evolve: return "evolve";
    case Subcommand::stationary: return "stationary";
    case Subcommand::limit: return "limit";
    case Subcommand::general: return "general";
    case Subcommand::sweep: return "sweep";
    case Subcommand::verify: return "verify";
  }
  return "?";
}

RunConfig default_config(Subcommand sub) {
  RunConfig c;
  c.subcommand = sub;
  switch (sub) {
    case Subcommand::evolve: {
      const GrowthReplica g = growth_replica();
      c.params = g.params;
      c.potential = "none";
      c.eps_auto = true;
      c.n_nodes = g.n_nodes;
      c.params.r_b = g.r_b;
      c.evolution = g.config;
      c.evolution.source.reset();
      c.growth = true;
      c.growth_spec = g.config.source.value_or(GrowthSpec{});
      c.shape = g.shape;
      break;
    }
    case Subcommand::stationary:
      c.params.gamma = 4.0;
      c.params.mass = 0.4;
      c.params.r_b = 2.0;
      break;
    case Subcommand::limit:
    case Subcommand::sweep:
      c.params.gamma = 10.0;
      break;
    case Subcommand::general:
      c.radius = 1.0;
      break;
    case Subcommand::verify:
      break;
  }
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

std::vector<std::pair<std::string, std::string>> RunConfig::to_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("subcommand", to_string(subcommand));
  for (const auto& k : key_table()) out.emplace_back(k.name, k.get(*this));
  return out;
}

void RunConfig::validate() const {
  try {
    params.validate();
    evolution.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (n_nodes < 8) throw ConfigError("n_nodes must be at least 8");
  if (!(radius >= 0.0)) throw ConfigError("radius must be nonnegative");
  if (!(r_out >= 0.0)) throw ConfigError("r_out must be nonnegative");
  for (double t : evolution.snapshot_times) {
    if (!(t >= 0.0)) throw ConfigError("snapshot_times must be nonnegative");
  }
  if (growth && !(growth_spec.rate >= 0.0)) throw ConfigError("growth_rate must be nonnegative");
  if (!(shape.width > 0.0)) throw ConfigError("width must be positive");
  for (double g : gammas) {
    if (!(g > 1.0)) throw ConfigError("gammas: every gamma must exceed 1");
  }
  for (double d : deltas) {
    if (!(d > 0.0)) throw ConfigError("deltas: every delta must be positive");
  }
  const bool needs_confinement = subcommand == Subcommand::stationary || subcommand == Subcommand::general;
  if (needs_confinement && !params.potential.strictly_increasing()) {
    throw ConfigError("potential must be strictly increasing for " + std::string(to_string(subcommand)));
  }
  if (subcommand == Subcommand::general && !(radius > 0.0)) {
    throw ConfigError("radius must be positive for general");
  }
  if (subcommand == Subcommand::sweep && gammas.empty()) throw ConfigError("gammas must not be empty");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Key* k = find_key(key);
  if (!k) throw ConfigError("unknown key '" + key + "'");
  k->set(cfg, value);
}

void apply_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key == "subcommand") {
      const std::string sub = trim(line.substr(eq + 1));
      if (sub != to_string(cfg.subcommand)) {
        throw ConfigError(where + "config is for '" + sub + "', not '" + to_string(cfg.subcommand) + "'");
      }
      continue;
    }
    try {
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

RunConfig parse_config_text(Subcommand sub, const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg = default_config(sub);
  apply_text(cfg, text);
  for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

RunConfig parse_config(Subcommand sub, const std::filesystem::path& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg = default_config(sub);
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(cfg, ss.str(), file.string());
  }
  for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.to_pairs()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace chradial::cli
