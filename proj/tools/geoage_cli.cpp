#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "geoage/error.hpp"
#include "geoage/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized AoI scheduling in Poisson bipolar networks"};
  app.require_subcommand(1);
  std::string config;
  geoage::RunOptions opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;

  const char* names[] = {"simulate", "analyze", "compare", "sweep"};
  const char* help[] = {
      "Sample networks, assign policies and run the slotted simulation",
      "Evaluate the analytical distributions and peak AoI",
      "Join simulation and analysis for figure3, figure4 or figure5",
      "Sweep xi or lambda across methods (figure6, figure7, figure8)"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override sim.seed");
    sub->add_option("--threads", opt.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const geoage::ExperimentConfig cfg = geoage::load_config(config);
    for (CLI::App* sub : subs) {
      if (sub->count("--seed") > 0) opt.seed = seed;
    }
    std::vector<std::string> written;
    if (subs[0]->parsed()) written = geoage::cmd_simulate(cfg, opt);
    if (subs[1]->parsed()) written = geoage::cmd_analyze(cfg, opt);
    if (subs[2]->parsed()) written = geoage::cmd_compare(cfg, opt);
    if (subs[3]->parsed()) written = geoage::cmd_sweep(cfg, opt);
    for (const auto& path : written) std::cout << path << '\n';
  } catch (const geoage::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
