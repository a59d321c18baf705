// Experiment driver: batch runs, network training, and the one-shot analyses.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hriex/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Safe active exploration experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed_offset = 0;
  int jobs = 1;
  double gamma = -1.0;
  double half_extent = 3.0;
  double resolution = 0.05;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run the configured experiment grid");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_path, "Output directory")->required();
  run->add_option("--seed-offset", seed_offset, "Offset added to every episode seed");
  run->add_option("--jobs", jobs, "Grid cells to run in parallel")->check(CLI::PositiveNumber);

  CLI::App* train = app.add_subcommand("train-nn", "Generate data and train the human model");
  train->add_option("--config", config_path, "JSON config with a train section")->required();
  train->add_option("--out", out_path, "Model output path")->required();

  CLI::App* influence = app.add_subcommand("influence-map", "Write the influence field CSV");
  influence->add_option("--config", config_path, "JSON experiment config")->required();
  influence->add_option("--out", out_path, "CSV output path")->required();
  influence->add_option("--gamma", gamma, "Override the configured influence gain");
  influence->add_option("--half-extent", half_extent, "Grid half extent (m)");
  influence->add_option("--res", resolution, "Grid resolution (m)");

  CLI::App* reach = app.add_subcommand("reachable-set", "Per-step safe reachable set size");
  reach->add_option("--config", config_path, "JSON experiment config")->required();
  reach->add_option("--out", out_path, "CSV output path")->required();
  reach->add_option("--seed", seed, "Episode seed (added to base_seed)");

  CLI::App* heldout = app.add_subcommand("held-out", "Held-out error of one adapted episode");
  heldout->add_option("--config", config_path, "JSON experiment config")->required();
  heldout->add_option("--out", out_path, "CSV output path")->required();
  heldout->add_option("--seed", seed, "Episode seed (added to base_seed)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return hriex::run_matrix({config_path, out_path, seed_offset, jobs}, std::cout);
  }
  if (train->parsed()) {
    return hriex::train_nn(config_path, out_path, std::cout);
  }
  if (influence->parsed()) {
    return hriex::write_influence_map(config_path, out_path, gamma, half_extent, resolution,
                                      std::cout);
  }
  if (reach->parsed()) {
    return hriex::write_reachable_series(config_path, out_path, seed, std::cout);
  }
  if (heldout->parsed()) {
    return hriex::write_held_out(config_path, out_path, seed, std::cout);
  }
  return 1;
}
