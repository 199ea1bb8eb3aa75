#include "gradsurg/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gradsurg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& value, int line) {
  long long x = 0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError(line, "expected an integer, got '" + value + "'");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& value, int line) {
  std::uint64_t x = 0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError(line, "expected an unsigned integer, got '" + value + "'");
  }
  return x;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  if (key == "dataset.num_classes") {
    cfg.dataset.num_classes = static_cast<int>(parse_int(value, line));
  } else if (key == "dataset.samples_per_class") {
    cfg.dataset.samples_per_class = static_cast<int>(parse_int(value, line));
  } else if (key == "dataset.input_dim") {
    cfg.dataset.input_dim = static_cast<int>(parse_int(value, line));
  } else if (key == "dataset.noise_sigma") {
    cfg.dataset.noise_sigma = parse_double(value, line);
  } else if (key == "dataset.holdout_classes") {
    cfg.dataset.holdout_classes = static_cast<int>(parse_int(value, line));
  } else if (key == "dataset.seed") {
    cfg.dataset.seed = parse_u64(value, line);
  } else if (key == "encoder.kind") {
    const auto kind = parse_encoder_kind(value);
    if (!kind) throw ParseError(line, "unknown encoder kind '" + value + "'");
    cfg.encoder.kind = *kind;
  } else if (key == "encoder.embed_dim") {
    cfg.encoder.embed_dim = static_cast<int>(parse_int(value, line));
  } else if (key == "surgery.direction") {
    const auto kind = parse_direction_kind(value);
    if (!kind) throw ParseError(line, "unknown direction '" + value + "'");
    cfg.surgery.direction = *kind;
  } else if (key == "surgery.pair_weight") {
    const auto kind = parse_pair_weight_kind(value);
    if (!kind) throw ParseError(line, "unknown pair weight '" + value + "'");
    cfg.surgery.pair_weight = *kind;
  } else if (key == "surgery.triplet_weight") {
    const auto kind = parse_triplet_weight_kind(value);
    if (!kind) throw ParseError(line, "unknown triplet weight '" + value + "'");
    cfg.surgery.triplet_weight = *kind;
  } else if (key == "surgery.mask") {
    const auto kind = parse_mask_kind(value);
    if (!kind) throw ParseError(line, "unknown mask '" + value + "'");
    cfg.surgery.mask = *kind;
  } else if (key == "surgery.tau") {
    cfg.surgery.tau = parse_double(value, line);
  } else if (key == "surgery.alpha") {
    cfg.surgery.alpha = parse_double(value, line);
  } else if (key == "surgery.beta") {
    cfg.surgery.beta = parse_double(value, line);
  } else if (key == "surgery.lambda") {
    cfg.surgery.lambda = parse_double(value, line);
  } else if (key == "surgery.margin") {
    cfg.surgery.margin = parse_double(value, line);
  } else if (key == "mining.epsilon") {
    cfg.mining_epsilon = parse_double(value, line);
  } else if (key == "train.epochs") {
    cfg.train.epochs = static_cast<int>(parse_int(value, line));
  } else if (key == "train.classes_per_batch") {
    cfg.train.batch.classes_per_batch = static_cast<int>(parse_int(value, line));
  } else if (key == "train.samples_per_class") {
    cfg.train.batch.samples_per_class = static_cast<int>(parse_int(value, line));
  } else if (key == "train.base_lr") {
    cfg.train.base_lr = parse_double(value, line);
  } else if (key == "train.lr_step_factor") {
    cfg.train.lr_step_factor = parse_double(value, line);
  } else if (key == "train.lr_milestone_frac") {
    cfg.train.lr_milestone_frac = parse_double(value, line);
  } else if (key == "train.aggregate") {
    const auto agg = parse_aggregate(value);
    if (!agg) throw ParseError(line, "unknown aggregate '" + value + "'");
    cfg.train.aggregate = *agg;
  } else if (key == "eval.ks") {
    cfg.eval_ks.clear();
    for (const auto& item : split_list(value)) {
      cfg.eval_ks.push_back(static_cast<int>(parse_int(item, line)));
    }
  } else if (key == "output.dir") {
    cfg.output_dir = value;
  } else if (key == "run.seeds") {
    cfg.repeat_seeds.clear();
    for (const auto& item : split_list(value)) {
      cfg.repeat_seeds.push_back(parse_u64(item, line));
    }
  } else {
    throw ParseError(line, "unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    apply_key(cfg, key, value, line_no);
  }
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "dataset.num_classes = " << cfg.dataset.num_classes << "\n";
  out << "dataset.samples_per_class = " << cfg.dataset.samples_per_class << "\n";
  out << "dataset.input_dim = " << cfg.dataset.input_dim << "\n";
  out << "dataset.noise_sigma = " << format_double(cfg.dataset.noise_sigma) << "\n";
  out << "dataset.holdout_classes = " << cfg.dataset.holdout_classes << "\n";
  out << "dataset.seed = " << cfg.dataset.seed << "\n";
  out << "encoder.kind = " << to_string(cfg.encoder.kind) << "\n";
  out << "encoder.embed_dim = " << cfg.encoder.embed_dim << "\n";
  out << "surgery.direction = " << to_string(cfg.surgery.direction) << "\n";
  out << "surgery.pair_weight = " << to_string(cfg.surgery.pair_weight) << "\n";
  out << "surgery.triplet_weight = " << to_string(cfg.surgery.triplet_weight) << "\n";
  out << "surgery.mask = " << to_string(cfg.surgery.mask) << "\n";
  out << "surgery.tau = " << format_double(cfg.surgery.tau) << "\n";
  out << "surgery.alpha = " << format_double(cfg.surgery.alpha) << "\n";
  out << "surgery.beta = " << format_double(cfg.surgery.beta) << "\n";
  out << "surgery.lambda = " << format_double(cfg.surgery.lambda) << "\n";
  out << "surgery.margin = " << format_double(cfg.surgery.margin) << "\n";
  out << "mining.epsilon = " << format_double(cfg.mining_epsilon) << "\n";
  out << "train.epochs = " << cfg.train.epochs << "\n";
  out << "train.classes_per_batch = " << cfg.train.batch.classes_per_batch << "\n";
  out << "train.samples_per_class = " << cfg.train.batch.samples_per_class << "\n";
  out << "train.base_lr = " << format_double(cfg.train.base_lr) << "\n";
  out << "train.lr_step_factor = " << format_double(cfg.train.lr_step_factor) << "\n";
  out << "train.lr_milestone_frac = " << format_double(cfg.train.lr_milestone_frac) << "\n";
  out << "train.aggregate = " << to_string(cfg.train.aggregate) << "\n";
  out << "eval.ks = ";
  for (std::size_t i = 0; i < cfg.eval_ks.size(); ++i) {
    out << (i ? "," : "") << cfg.eval_ks[i];
  }
  out << "\n";
  out << "output.dir = " << cfg.output_dir << "\n";
  out << "run.seeds = ";
  for (std::size_t i = 0; i < cfg.repeat_seeds.size(); ++i) {
    out << (i ? "," : "") << cfg.repeat_seeds[i];
  }
  out << "\n";
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  const auto fail = [](const std::string& what) { throw ValidationError(what); };

  if (cfg.dataset.num_classes < 2) fail("dataset.num_classes must be >= 2");
  if (cfg.dataset.samples_per_class < 1) fail("dataset.samples_per_class must be >= 1");
  if (cfg.dataset.input_dim < 2) fail("dataset.input_dim must be >= 2");
  if (cfg.dataset.noise_sigma < 0.0) fail("dataset.noise_sigma must be >= 0");
  if (cfg.dataset.holdout_classes < 0) fail("dataset.holdout_classes must be >= 0");
  if (cfg.dataset.holdout_classes >= cfg.dataset.num_classes) {
    fail("dataset.holdout_classes must be < dataset.num_classes");
  }
  if (cfg.encoder.embed_dim < 2) fail("encoder.embed_dim must be >= 2");
  if (cfg.surgery.tau <= 0.0) fail("surgery.tau must be > 0");
  if (cfg.surgery.alpha <= 0.0) fail("surgery.alpha must be > 0");
  if (cfg.surgery.beta <= 0.0) fail("surgery.beta must be > 0");
  if (cfg.surgery.lambda < 0.0 || cfg.surgery.lambda > 1.0) {
    fail("surgery.lambda must be in [0, 1]");
  }
  if (cfg.surgery.margin < 0.0) fail("surgery.margin must be >= 0");
  if (cfg.mining_epsilon < 0.0) fail("mining.epsilon must be >= 0");
  if (cfg.train.epochs < 0) fail("train.epochs must be >= 0");
  if (cfg.train.batch.classes_per_batch < 2) fail("train.classes_per_batch must be >= 2");
  if (cfg.train.batch.samples_per_class < 2) fail("train.samples_per_class must be >= 2");
  if (cfg.train.base_lr <= 0.0) fail("train.base_lr must be > 0");
  if (cfg.train.lr_step_factor <= 0.0 || cfg.train.lr_step_factor >= 1.0) {
    fail("train.lr_step_factor must be in (0, 1)");
  }
  if (cfg.train.lr_milestone_frac <= 0.0 || cfg.train.lr_milestone_frac >= 1.0) {
    fail("train.lr_milestone_frac must be in (0, 1)");
  }
  if (cfg.eval_ks.empty()) fail("eval.ks must not be empty");
  for (int k : cfg.eval_ks) {
    if (k < 1) fail("eval.ks entries must be >= 1");
  }
  if (cfg.repeat_seeds.empty()) fail("run.seeds must not be empty");
  if (cfg.output_dir.empty()) fail("output.dir must not be empty");
}

}  // namespace gradsurg
