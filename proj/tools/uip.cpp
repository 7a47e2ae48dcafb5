#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "uip/commands.hpp"
#include "uip/config.hpp"
#include "uip/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Indifference pricing under linear price impact in the Bachelier model"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<int> workers;
  bool quiet = false;
  app.add_option("--config", config_path, "Config file (section.key = value)");
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--seed", seed, "Override numerics.seed");
  app.add_option("--paths", paths, "Override numerics.n_paths");
  app.add_option("--workers", workers, "Override numerics.workers (0: OpenMP default)");
  app.add_flag("--quiet", quiet, "Suppress progress messages");

  for (const char* name : {"price", "figure", "hedge", "converge", "dual", "check"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("price")->description("u^A(t, x), its gradient and heat-equation residual over the A grid");
  app.get_subcommand("figure")->description("Limiting indifference price over the A grid");
  app.get_subcommand("hedge")->description("Per-path outcomes of the tracking strategy");
  app.get_subcommand("converge")->description("Monte Carlo certainty equivalents over the Lambda list");
  app.get_subcommand("dual")->description("Dual lower bounds for the configured specs");
  app.get_subcommand("check")->description("Invariant suite with one PASS/FAIL line per item");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  uip::ExperimentConfig cfg;
  try {
    // Without --config the built-in defaults (fixed seed) are used.
    if (!config_path.empty()) cfg = uip::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (paths) cfg.n_paths = *paths;
    if (workers) cfg.workers = *workers;
    uip::validate(cfg);
  } catch (const uip::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uip::kExitInvalid;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return uip::kExitInvalid;
    }
  }
  std::ostream& csv = out_path.empty() ? std::cout : file;
  uip::CommandContext ctx{csv, std::cerr, quiet};
  return uip::run_command(command, cfg, ctx);
}
