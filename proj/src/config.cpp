#include "mg/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "mg/error.hpp"

#ifndef MG_PRESET_DIR
#define MG_PRESET_DIR "presets"
#endif

namespace mg {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"name", "kind", "seed", "snapshot_every"}},
      {"grid", {"N", "pad", "max_N"}},
      {"line", {"q", "radius"}},
      {"initial", {"kind", "amplitude", "beta", "k_max", "pair_mode", "seed", "norm_order", "norm_value", "path"}},
      {"model", {"eps_hyper", "eps_kappa", "gamma", "omega_prime"}},
      {"time", {"dt", "t_end", "scheme", "record_every"}},
      {"analysis", {"orders", "C_s", "C_alpha", "C_kappa", "alpha", "delta"}},
      {"picard",
       {"source", "eps", "n_max", "steps", "s", "horizon", "horizon_factor", "drift_k_max", "drift_beta",
        "drift_amplitude", "drift_seed"}},
      {"checks",
       {"decay_tol", "energy_residual_max", "production_max", "nonlinear_max", "leakage_max", "picard_ratio_max",
        "max_principle", "bootstrap"}},
  };
  return keys;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorKind::Config, fmt::format("{} = '{}' is not {}", key, value, expected));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, "a number");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) bad_value(key, value, "a comma-separated list of numbers");
    out.push_back(to_double(key, item.substr(first, last - first + 1)));
  }
  return out;
}

// Flat view of the parsed file: "section.key" -> value.
class Table {
 public:
  explicit Table(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}

  std::optional<std::string> get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  template <typename T, typename Convert>
  void read(const std::string& key, T& target, Convert&& convert) const {
    if (const auto v = get(key)) target = convert(key, *v);
  }
  void read(const std::string& key, double& target) const { read(key, target, to_double); }
  void read(const std::string& key, int& target) const { read(key, target, to_int<int>); }
  void read(const std::string& key, std::int64_t& target) const { read(key, target, to_int<std::int64_t>); }
  void read(const std::string& key, std::uint64_t& target) const { read(key, target, to_int<std::uint64_t>); }
  void read(const std::string& key, bool& target) const { read(key, target, to_bool); }
  void read(const std::string& key, std::string& target) const {
    if (const auto v = get(key)) target = *v;
  }
  void read(const std::string& key, std::optional<double>& target) const {
    if (const auto v = get(key)) target = to_double(key, *v);
  }

 private:
  std::map<std::string, std::string> entries_;
};

std::map<std::string, std::string> flatten(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Config, fmt::format("line {}: {}", e.line(), e.message()));
  }
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end() || body.empty()) {
      throw Error(ErrorKind::Config, fmt::format("unknown section or top-level key '{}'", section));
    }
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) throw Error(ErrorKind::Config, fmt::format("unknown key {}.{}", section, key));
      out[section + "." + key] = value.get_value<std::string>();
    }
  }
  return out;
}

Scheme to_scheme(const std::string& value) {
  if (value == "exact_line") return Scheme::ExactLine;
  if (value == "if_rk4") return Scheme::IfRk4;
  if (value == "picard") return Scheme::Picard;
  bad_value("time.scheme", value, "one of exact_line, if_rk4, picard");
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string RunConfig::hash() const { return fmt::format("{:016x}", fnv1a(canonical_text)); }

RunConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
  auto entries = flatten(text);
  if (seed_override) entries["run.seed"] = std::to_string(*seed_override);
  const Table t(entries);

  RunConfig c;
  t.read("run.name", c.name);
  t.read("run.kind", c.kind);
  t.read("run.seed", c.seed);
  t.read("run.snapshot_every", c.sim.snapshot_every);
  if (!c.kind.empty() && c.kind != "line" && c.kind != "full" && c.kind != "picard") {
    bad_value("run.kind", c.kind, "one of line, full, picard");
  }
  if (c.name.empty() || c.name.find('/') != std::string::npos) bad_value("run.name", c.name, "a plain file name");

  int n = c.grid.N;
  double pad = c.grid.pad;
  t.read("grid.N", n);
  t.read("grid.pad", pad);
  t.read("grid.max_N", c.max_N);
  if (n > c.max_N) throw Error(ErrorKind::Config, fmt::format("grid.N = {} exceeds the cap max_N = {}", n, c.max_N));
  try {
    c.grid = GridSpec(n, pad);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }

  if (const auto q = t.get("line.q")) {
    try {
      c.line = canonicalize_line(parse_rational_triple(*q));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroDirection) throw;
      throw Error(ErrorKind::Config, e.what());
    }
  }
  t.read("line.radius", c.line_radius);
  if (c.line_radius < 0) bad_value("line.radius", std::to_string(c.line_radius), "nonnegative");

  InitialSpec& init = c.initial;
  init.seed = c.seed;
  t.read("initial.kind", init.kind);
  t.read("initial.amplitude", init.amplitude);
  t.read("initial.beta", init.beta);
  t.read("initial.k_max", init.k_max);
  t.read("initial.pair_mode", init.pair_mode);
  t.read("initial.seed", init.seed);
  if (const auto v = t.get("initial.norm_order")) init.norm_order = *v;
  if (const auto v = t.get("initial.norm_value")) init.norm_value = *v;
  if (const auto v = t.get("initial.path")) init.path = *v;
  static const std::set<std::string> kinds{"random_line", "random_field", "curved_region", "line_pair", "zero",
                                           "snapshot"};
  if (!kinds.contains(init.kind)) bad_value("initial.kind", init.kind, "a known initial-data kind");

  ModelParams& model = c.sim.model;
  t.read("model.eps_hyper", model.eps_hyper);
  t.read("model.eps_kappa", model.eps_kappa);
  t.read("model.gamma", model.gamma);
  t.read("model.omega_prime", model.omega_prime);

  t.read("time.dt", c.sim.dt);
  t.read("time.t_end", c.sim.t_end);
  t.read("time.record_every", c.sim.record_every);
  if (const auto v = t.get("time.scheme")) c.sim.scheme = to_scheme(*v);

  AnalysisConstants& k = c.sim.constants;
  if (const auto v = t.get("analysis.orders")) c.sim.sobolev_orders = to_list("analysis.orders", *v);
  t.read("analysis.C_s", k.C_s);
  t.read("analysis.C_alpha", k.C_alpha);
  t.read("analysis.C_kappa", k.C_kappa);
  t.read("analysis.alpha", k.alpha);
  t.read("analysis.delta", k.delta);

  PicardSpec& p = c.picard;
  p.drift_seed = c.seed + 1;
  t.read("picard.source", p.source);
  t.read("picard.eps", p.eps);
  t.read("picard.n_max", p.n_max);
  t.read("picard.steps", p.steps);
  t.read("picard.s", p.s);
  t.read("picard.horizon", p.horizon);
  t.read("picard.horizon_factor", p.horizon_factor);
  t.read("picard.drift_k_max", p.drift_k_max);
  t.read("picard.drift_beta", p.drift_beta);
  t.read("picard.drift_amplitude", p.drift_amplitude);
  t.read("picard.drift_seed", p.drift_seed);
  if (p.source != "frozen" && p.source != "self") bad_value("picard.source", p.source, "frozen or self");
  if (p.steps < 1) bad_value("picard.steps", std::to_string(p.steps), "positive");

  CheckSpec& ch = c.checks;
  t.read("checks.decay_tol", ch.decay_tol);
  t.read("checks.energy_residual_max", ch.energy_residual_max);
  t.read("checks.production_max", ch.production_max);
  t.read("checks.nonlinear_max", ch.nonlinear_max);
  t.read("checks.leakage_max", ch.leakage_max);
  t.read("checks.picard_ratio_max", ch.picard_ratio_max);
  t.read("checks.max_principle", ch.max_principle);
  t.read("checks.bootstrap", ch.bootstrap);

  try {
    c.sim.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }

  for (const auto& [key, value] : entries) c.canonical_text += key + "=" + value + "\n";
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_override);
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("MG_PRESET_DIR"); env != nullptr && *env != '\0') return env;
  return MG_PRESET_DIR;
}

std::filesystem::path preset_path(std::string_view name) {
  auto path = preset_dir() / (std::string(name) + ".cfg");
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "no preset named '" + std::string(name) + "'");
  return path;
}

}  // namespace mg
