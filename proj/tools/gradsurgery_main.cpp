#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradsurg/runner.hpp"
#include "gradsurg/verify.hpp"

namespace {

gradsurg::RunConfig load_config(const std::string& path, const std::string& output_dir) {
  gradsurg::RunConfig cfg = gradsurg::parse_config_file(path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct gradient surgery for metric-learning embeddings"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --threads appear after the subcommand

  int threads = 0;  // 0 = available parallelism
  app.add_option("--threads", threads, "Cap on worker threads (default: available parallelism)");

  auto* verify = app.add_subcommand("verify", "Run the numerical verification suites");

  std::string train_config;
  std::string output_dir;
  auto* train = app.add_subcommand("train", "Train per config and write CSV results");
  train->add_option("config", train_config, "Path to config file")->required();
  train->add_option("--output-dir", output_dir, "Override output.dir from the config");

  std::string sweep_config;
  std::string axis;
  std::string values_arg;
  auto* sweep = app.add_subcommand("sweep", "Run one training per axis value per seed");
  sweep->add_option("config", sweep_config, "Path to config file")->required();
  sweep->add_option("--axis", axis, "direction|pair_weight|triplet_weight|lr")->required();
  sweep->add_option("--values", values_arg, "Comma-separated axis values")->required();
  sweep->add_option("--output-dir", output_dir, "Override output.dir from the config");

  std::string diagram_config;
  auto* diagram = app.add_subcommand("diagram", "Train per config and write only diagram.csv");
  diagram->add_option("config", diagram_config, "Path to config file")->required();
  diagram->add_option("--output-dir", output_dir, "Override output.dir from the config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const auto results = gradsurg::run_verification();
      gradsurg::print_report(results, std::cout);
      return gradsurg::all_passed(results) ? 0 : 1;
    }
    if (train->parsed()) {
      gradsurg::cmd_train(load_config(train_config, output_dir), threads);
      return 0;
    }
    if (sweep->parsed()) {
      std::vector<std::string> values;
      std::string item;
      std::stringstream ss(values_arg);
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(item);
      }
      gradsurg::cmd_sweep(load_config(sweep_config, output_dir), axis, values, threads);
      return 0;
    }
    if (diagram->parsed()) {
      gradsurg::cmd_diagram(load_config(diagram_config, output_dir), threads);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
