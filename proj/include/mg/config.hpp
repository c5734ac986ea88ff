#pragma once

// Run configuration: an INI-style file with [section] headers and
// key = value lines. Unknown sections or keys are rejected so typos fail
// loudly instead of silently falling back to defaults.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mg/grid.hpp"
#include "mg/lattice.hpp"
#include "mg/timestepping.hpp"

namespace mg {

struct InitialSpec {
  // random_line | random_field | curved_region | line_pair | zero | snapshot
  std::string kind = "random_line";
  double amplitude = 1.0;
  double beta = 2.0;
  int k_max = 4;
  std::int64_t pair_mode = 1;
  std::uint64_t seed = 0;
  // Optional rescaling so that ||theta_0||_{H^order} = value. `order` may be
  // "kappa"; `value` may be "epsilon0".
  std::optional<std::string> norm_order;
  std::optional<std::string> norm_value;
  std::filesystem::path path;
};

struct PicardSpec {
  std::string source = "frozen";  // frozen | self
  double eps = 0.1;
  int n_max = 6;
  int steps = 64;
  double s = 2.51;
  std::string horizon = "t_star_eps";  // or a number
  double horizon_factor = 1.0;
  int drift_k_max = 3;
  double drift_beta = 2.0;
  double drift_amplitude = 1.0;
  std::uint64_t drift_seed = 1;
};

struct CheckSpec {
  std::optional<double> decay_tol;
  std::optional<double> energy_residual_max;
  std::optional<double> production_max;
  std::optional<double> nonlinear_max;
  std::optional<double> leakage_max;
  std::optional<double> picard_ratio_max;
  bool max_principle = false;
  bool bootstrap = false;
};

struct RunConfig {
  std::string name = "run";
  std::string kind;  // line | full | picard; empty accepts any command
  std::uint64_t seed = 0;
  GridSpec grid{8};
  int max_N = 64;
  std::optional<LineSpec> line;
  int line_radius = 16;
  InitialSpec initial;
  SimConfig sim;
  PicardSpec picard;
  CheckSpec checks;
  /// Sorted "section.key=value" lines after overrides; the hash input.
  std::string canonical_text;

  /// FNV-1a 64 of canonical_text, as 16 hex digits.
  std::string hash() const;
};

/// Throws Error(Config) on syntax errors, unknown keys or bad values.
RunConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Directory holding the shipped presets: $MG_PRESET_DIR if set, else the
/// compiled-in location.
std::filesystem::path preset_dir();
std::filesystem::path preset_path(std::string_view name);

}  // namespace mg
