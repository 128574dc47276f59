// disdrift: strong-convergence experiments for scalar SDEs whose drift is
// piecewise Lipschitz. Subcommands load a JSON experiment configuration,
// run deterministically under (config, seed), and write CSVs plus companion
// gnuplot scripts.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "disdrift/cli.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment configuration")
      ->required();
  cmd->add_option("--seed", flags.seed, "master seed (overrides the config)");
  cmd->add_option("--out", flags.out, "output CSV path (overrides the config)");
  cmd->add_option("--workers", flags.workers, "worker threads (overrides the config)");
}

disdrift::ExperimentConfig load(const CommonFlags& flags) {
  disdrift::ExperimentConfig config = disdrift::load_config_file(flags.config_path);
  config.seed = disdrift::resolve_seed(config, flags.seed);
  config.seed_set = true;
  if (!flags.out.empty()) config.output = flags.out;
  if (flags.workers) {
    if (*flags.workers < 1) throw disdrift::ConfigError("--workers must be at least 1");
    config.workers = *flags.workers;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong-convergence toolkit for SDEs with discontinuous drift"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* simulate = app.add_subcommand("simulate", "sample trajectories at one step size");
  CLI::App* order = app.add_subcommand("estimate-order", "strong-error ladder and rate fit");
  CLI::App* cost = app.add_subcommand("adaptive-cost", "mean adaptive step counts per delta");
  CLI::App* seminorm = app.add_subcommand("seminorm", "drift regularity and predicted rate");
  CLI::App* rare = app.add_subcommand("rare-event", "paired breakpoint-hitting fractions");
  app.add_subcommand("presets", "list the built-in problem presets");
  for (CLI::App* cmd : {simulate, order, cost, seminorm, rare}) add_common_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad flags are configuration errors
  }

  try {
    if (app.got_subcommand("presets")) {
      disdrift::run_presets_listing();
      return 0;
    }
    const disdrift::ExperimentConfig config = load(flags);
    if (app.got_subcommand(simulate)) disdrift::run_simulate(config);
    else if (app.got_subcommand(order)) disdrift::run_estimate_order(config);
    else if (app.got_subcommand(cost)) disdrift::run_adaptive_cost(config);
    else if (app.got_subcommand(seminorm)) disdrift::run_seminorm(config);
    else if (app.got_subcommand(rare)) disdrift::run_rare_event(config);
    return 0;
  } catch (const disdrift::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const disdrift::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
