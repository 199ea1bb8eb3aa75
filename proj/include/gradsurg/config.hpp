#pragma once

#include <string>
#include <vector>

#include "gradsurg/training.hpp"

namespace gradsurg {

// One experiment: dataset, encoder, surgery recipe, mining slack, schedule,
// evaluation cutoffs, output location, and the seeds to repeat over.
struct RunConfig {
  SyntheticSpec dataset;
  EncoderSpec encoder;
  SurgeryConfig surgery;
  double mining_epsilon = 0.1;
  TrainParams train;
  std::vector<int> eval_ks = {1, 2, 4, 8};
  std::string output_dir = "out";
  std::vector<std::uint64_t> repeat_seeds = {1, 2, 3, 4, 5};
};

// Parses the flat dotted-key = value format. Unknown keys, bad syntax, and
// unparseable values raise ParseError with the line number; a well-formed
// document violating an invariant raises ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Every key written out explicitly, floats at 17 significant digits, so the
// echo parses back to the identical configuration.
std::string serialize_config(const RunConfig& cfg);

void validate_config(const RunConfig& cfg);

// 17-significant-digit float formatting shared by config echo and CSVs.
std::string format_double(double x);

}  // namespace gradsurg
