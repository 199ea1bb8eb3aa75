#pragma once

#include <string>
#include <vector>

#include "gradsurg/config.hpp"

namespace gradsurg {

// Runs the full multi-seed protocol of a config and writes recall.csv,
// stats.csv, diagram.csv, and config.resolved under cfg.output_dir.
// Byte-identical outputs for identical configs, independent of threads.
void cmd_train(const RunConfig& cfg, int threads);

// One run per (axis value, seed), each in its own subdirectory, then
// summary.csv with mean and standard deviation of final holdout recall@1
// per value. All values are validated before any run starts.
void cmd_sweep(const RunConfig& cfg, const std::string& axis,
               const std::vector<std::string>& values, int threads);

// Trains like cmd_train but writes only diagram.csv and the config echo.
void cmd_diagram(const RunConfig& cfg, int threads);

// Executes a training run with one seed; shared by the commands above and
// the acceptance experiments.
TrainResult run_single(const RunConfig& cfg, std::uint64_t seed, int threads);

}  // namespace gradsurg
