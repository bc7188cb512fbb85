#include <iostream>

#include <CLI11.hpp>

#include "subprime_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"subprime_sim: two-bank credit market simulator with risk-gated lending"};
  app.require_subcommand(1);

  subprime::cli::CommandOptions opts;
  std::string mode;
  std::string aggregation;
  std::uint64_t seed = 0;
  std::uint64_t replications = 0;
  std::uint64_t horizon = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opts.scenario, "Scenario JSON file")->required()->check(
        CLI::ExistingFile);
    sub->add_flag("--validate-assumptions,!--no-validate", opts.validate,
                  "Check the trap assumptions (default on)");
    sub->add_option("--aggregation", aggregation, "sum-of-stds | independent")
        ->check(CLI::IsMember({"sum-of-stds", "independent", "sum_of_stds"}));
    sub->add_option("--mode", mode, "baseline | adaptive-var | adaptive-es | guarantee")
        ->check(CLI::IsMember({"baseline", "adaptive-var", "adaptive-es", "guarantee"}));
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--replications", replications, "Monte Carlo replications")
        ->check(CLI::PositiveNumber);
    sub->add_option("--horizon", horizon, "Number of periods");
  };

  auto* thresholds = app.add_subcommand("thresholds", "Print variance thresholds and checks");
  add_common(thresholds);

  auto* simulate = app.add_subcommand("simulate", "Run one trajectory and write CSV/JSON output");
  add_common(simulate);
  simulate->add_option("--out", opts.out, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter over a grid");
  add_common(sweep);
  sweep->add_option("--sweep", opts.sweep, "Sweep spec JSON")->required()->check(
      CLI::ExistingFile);
  sweep->add_option("--out", opts.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {thresholds, simulate, sweep}) {
    if (!sub->parsed()) {
      continue;
    }
    if (sub->count("--mode")) {
      opts.mode = mode;
    }
    if (sub->count("--aggregation")) {
      opts.aggregation = aggregation;
    }
    if (sub->count("--seed")) {
      opts.seed = seed;
    }
    if (sub->count("--replications")) {
      opts.replications = replications;
    }
    if (sub->count("--horizon")) {
      opts.horizon = horizon;
    }
  }

  if (thresholds->parsed()) {
    return subprime::cli::cmd_thresholds(opts, std::cout, std::cerr);
  }
  if (simulate->parsed()) {
    return subprime::cli::cmd_simulate(opts, std::cout, std::cerr);
  }
  return subprime::cli::cmd_sweep(opts, std::cout, std::cerr);
}
