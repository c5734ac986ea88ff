#pragma once

// Subcommands of the mg_spectral tool, callable in-process so tests can
// drive them without spawning the executable.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "mg/config.hpp"
#include "mg/error.hpp"

namespace mg::cli {

enum ExitCode : int {
  kPass = 0,
  kCrash = 1,
  kInvariantViolation = 2,
  kConfigError = 3,
  kBlowUp = 4,
};

/// Maps a library error to the exit-code contract.
int exit_code_for(const Error& e);

struct Outcome {
  int exit_code = kPass;
  std::filesystem::path run_dir;
  nlohmann::ordered_json summary;
};

Outcome line_run(const RunConfig& config, const std::filesystem::path& out_root);
Outcome full_run(const RunConfig& config, const std::filesystem::path& out_root);
Outcome picard_run(const RunConfig& config, const std::filesystem::path& out_root);

struct SymbolsOptions {
  std::optional<int> N;
  std::optional<std::string> probe;     // "r=0.5" or "0.5"
  std::string k1_range = "64:4096";     // "lo:hi"
  int points = 25;
  std::optional<std::string> line;      // "a,b,c"
  std::optional<std::string> cone;      // rational aperture
};

/// Writes symbols.csv and probe.json under out_dir as requested and prints a
/// JSON object with the computed constants to `os`.
int symbols_command(const SymbolsOptions& options, const std::filesystem::path& out_dir, std::ostream& os);

/// Prints a readable digest of <run_dir>/summary.json. Returns kPass when the
/// run passed its checks, kInvariantViolation otherwise.
int report_command(const std::filesystem::path& run_dir, std::ostream& os);

/// $MG_SPECTRAL_OUT if set, else ./runs.
std::filesystem::path default_out_root();

}  // namespace mg::cli
