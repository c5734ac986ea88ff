// mg_spectral: command-line driver for the MG line-data toolkit.

#include <algorithm>
#include <atomic>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mg/cli.hpp"
#include "mg/config.hpp"

namespace {

using RunFn = std::function<mg::cli::Outcome(const mg::RunConfig&, const std::filesystem::path&)>;

struct RunFlags {
  std::string config;
  std::string presets;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::mutex g_print;

int run_one(const RunFn& fn, const std::filesystem::path& config, const RunFlags& flags) {
  try {
    const mg::RunConfig c = mg::load_config(config, flags.seed);
    const auto root = flags.out.empty() ? mg::cli::default_out_root() : std::filesystem::path(flags.out);
    const auto outcome = fn(c, root);
    const std::lock_guard lock(g_print);
    const char* verdict = outcome.exit_code == mg::cli::kPass ? "PASSED" : "FAILED";
    std::cout << fmt::format("{} {} -> {}\n", verdict, c.name, outcome.run_dir.string());
    for (const auto& check : outcome.summary.value("checks", nlohmann::ordered_json::array())) {
      if (!check["passed"].get<bool>()) {
        std::cout << fmt::format("  check {} failed: {:.6e} > {:.6e}\n", check["name"].get<std::string>(),
                                 check["value"].get<double>(), check["limit"].get<double>());
      }
    }
    if (outcome.summary.contains("blowup_time") && !outcome.summary["blowup_time"].is_null()) {
      std::cout << fmt::format("  non-finite state at t = {}\n", outcome.summary["blowup_time"].get<double>());
    }
    return outcome.exit_code;
  } catch (const mg::Error& e) {
    const std::lock_guard lock(g_print);
    std::cerr << "error: " << e.what() << "\n";
    return mg::cli::exit_code_for(e);
  } catch (const std::exception& e) {
    const std::lock_guard lock(g_print);
    std::cerr << "error: " << e.what() << "\n";
    return mg::cli::kCrash;
  }
}

int run_command(const RunFn& fn, const RunFlags& flags) {
  std::vector<std::filesystem::path> configs;
  if (!flags.config.empty()) configs.emplace_back(flags.config);
  try {
    for (const auto& name : split_list(flags.presets)) configs.push_back(mg::preset_path(name));
  } catch (const mg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mg::cli::exit_code_for(e);
  }
  if (configs.empty()) {
    std::cerr << "error: pass --config PATH or --preset NAME\n";
    return mg::cli::kConfigError;
  }

  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) codes[i] = run_one(fn, configs[i], flags);
  };
  const auto workers = static_cast<std::size_t>(std::clamp<int>(flags.jobs, 1, static_cast<int>(configs.size())));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  return *std::max_element(codes.begin(), codes.end());
}

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config, "Config file");
  cmd->add_option("--preset", flags.presets, "Preset name(s), comma separated");
  cmd->add_option("--out", flags.out, "Output root (default $MG_SPECTRAL_OUT or ./runs)");
  cmd->add_option("--seed", flags.seed, "Override run.seed");
  cmd->add_option("--jobs", flags.jobs, "Parallel jobs for preset batches")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral MG active scalar toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MG_VERSION);

  mg::cli::SymbolsOptions sym;
  std::string sym_out;
  auto* symbols = app.add_subcommand("symbols", "Symbol tables, asymptotic probes, line and cone constants");
  symbols->add_option("--N", sym.N, "Dump M1, M2, M3 for |k_i| <= N");
  symbols->add_option("--probe", sym.probe, "Probe exponent, e.g. r=0.5");
  symbols->add_option("--k1", sym.k1_range, "Probe sweep range lo:hi");
  symbols->add_option("--points", sym.points, "Probe sweep points");
  symbols->add_option("--line", sym.line, "Line direction a,b,c (rationals allowed)");
  symbols->add_option("--cone", sym.cone, "Cone aperture C");
  symbols->add_option("--out", sym_out, "Output directory");

  RunFlags line_flags, full_flags, picard_flags;
  add_run_flags(app.add_subcommand("line-run", "Evolve line-supported data"), line_flags);
  add_run_flags(app.add_subcommand("full-run", "Evolve data on the full 3-D grid"), full_flags);
  add_run_flags(app.add_subcommand("picard", "Picard iteration contraction study"), picard_flags);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarize a finished run");
  report->add_option("run_dir", report_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mg::cli::kConfigError;
  }

  if (app.got_subcommand("line-run")) return run_command(mg::cli::line_run, line_flags);
  if (app.got_subcommand("full-run")) return run_command(mg::cli::full_run, full_flags);
  if (app.got_subcommand("picard")) return run_command(mg::cli::picard_run, picard_flags);

  try {
    if (app.got_subcommand("symbols")) {
      const auto dir = sym_out.empty() ? mg::cli::default_out_root() / "symbols" : std::filesystem::path(sym_out);
      return mg::cli::symbols_command(sym, dir, std::cout);
    }
    return mg::cli::report_command(report_dir, std::cout);
  } catch (const mg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mg::cli::exit_code_for(e);
  }
}
