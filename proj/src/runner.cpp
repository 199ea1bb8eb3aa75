#include "gradsurg/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gradsurg/parallel.hpp"

namespace fs = std::filesystem;

namespace gradsurg {

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  TrainLog log;
  std::vector<DiagramRow> diagram_train;
  std::vector<DiagramRow> diagram_holdout;
  std::vector<int> train_ids;
  std::vector<int> holdout_ids;
};

SeedOutcome run_seed(const RunConfig& cfg, std::uint64_t seed, int threads) {
  TrainResult result = run_single(cfg, seed, threads);
  SeedOutcome out;
  out.seed = seed;
  out.log = std::move(result.log);
  out.train_ids = result.dataset.split_ids(false);
  out.holdout_ids = result.dataset.split_ids(true);

  const std::vector<Embedding> all = result.encoder.forward_all(result.dataset);
  const auto diagram_for = [&](const std::vector<int>& ids) {
    std::vector<Embedding> embs;
    std::vector<int> lbls;
    for (int id : ids) {
      embs.push_back(all[static_cast<std::size_t>(id)]);
      lbls.push_back(result.dataset.labels[static_cast<std::size_t>(id)]);
    }
    std::vector<DiagramRow> rows = triplet_diagram(embs, lbls);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].anchor_id = ids[i];  // report global sample ids
    }
    return rows;
  };
  out.diagram_train = diagram_for(out.train_ids);
  if (!out.holdout_ids.empty()) out.diagram_holdout = diagram_for(out.holdout_ids);
  return out;
}

std::vector<SeedOutcome> run_all_seeds(const RunConfig& cfg, int threads) {
  std::vector<SeedOutcome> outcomes(cfg.repeat_seeds.size());
  // One worker per run; each run stays single-threaded so the same batch of
  // work is done regardless of the cap.
  parallel_for(cfg.repeat_seeds.size(), threads,
               [&](std::size_t i) { outcomes[i] = run_seed(cfg, cfg.repeat_seeds[i], 1); });
  return outcomes;
}

std::string recall_csv(const RunConfig& cfg, const std::vector<SeedOutcome>& outcomes) {
  std::ostringstream out;
  out << "seed,epoch,split,k,recall\n";
  for (const auto& o : outcomes) {
    for (const auto& rec : o.log.epochs) {
      for (const char* split : {"train", "holdout"}) {
        const bool holdout = split[0] == 'h';
        for (int k : cfg.eval_ks) {
          const auto it = std::find(o.log.ks.begin(), o.log.ks.end(), k);
          const auto idx = static_cast<std::size_t>(it - o.log.ks.begin());
          const double r = holdout ? rec.recall_holdout[idx] : rec.recall_train[idx];
          out << o.seed << ',' << rec.epoch << ',' << split << ',' << k << ','
              << format_double(r) << "\n";
        }
      }
    }
  }
  return out.str();
}

std::string stats_csv(const std::vector<SeedOutcome>& outcomes) {
  std::ostringstream out;
  out << "seed,epoch,mean_s_ap,mean_s_an,lr\n";
  for (const auto& o : outcomes) {
    for (const auto& rec : o.log.epochs) {
      out << o.seed << ',' << rec.epoch << ',' << format_double(rec.mean_s_ap) << ','
          << format_double(rec.mean_s_an) << ',' << format_double(rec.lr) << "\n";
    }
  }
  return out.str();
}

std::string diagram_csv(const std::vector<SeedOutcome>& outcomes) {
  std::ostringstream out;
  out << "seed,split,anchor_id,s_np,s_nn\n";
  for (const auto& o : outcomes) {
    for (const auto& row : o.diagram_train) {
      out << o.seed << ",train," << row.anchor_id << ',' << format_double(row.s_np) << ','
          << format_double(row.s_nn) << "\n";
    }
    for (const auto& row : o.diagram_holdout) {
      out << o.seed << ",holdout," << row.anchor_id << ',' << format_double(row.s_np) << ','
          << format_double(row.s_nn) << "\n";
    }
  }
  return out.str();
}

void write_outputs(const RunConfig& cfg, const std::vector<SeedOutcome>& outcomes,
                   bool diagram_only) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  if (!diagram_only) {
    write_file(dir / "recall.csv", recall_csv(cfg, outcomes));
    write_file(dir / "stats.csv", stats_csv(outcomes));
  }
  write_file(dir / "diagram.csv", diagram_csv(outcomes));
  write_file(dir / "config.resolved", serialize_config(cfg));
}

struct AxisValue {
  std::string text;
  RunConfig cfg;  // config with the value applied
};

std::vector<AxisValue> resolve_axis(const RunConfig& base, const std::string& axis,
                                    const std::vector<std::string>& values) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  std::vector<AxisValue> out;
  for (const auto& v : values) {
    AxisValue av{v, base};
    if (axis == "direction") {
      const auto kind = parse_direction_kind(v);
      if (!kind) throw ValidationError("invalid direction value '" + v + "'");
      av.cfg.surgery.direction = *kind;
    } else if (axis == "pair_weight") {
      const auto kind = parse_pair_weight_kind(v);
      if (!kind) throw ValidationError("invalid pair_weight value '" + v + "'");
      av.cfg.surgery.pair_weight = *kind;
    } else if (axis == "triplet_weight") {
      const auto kind = parse_triplet_weight_kind(v);
      if (!kind) throw ValidationError("invalid triplet_weight value '" + v + "'");
      av.cfg.surgery.triplet_weight = *kind;
    } else if (axis == "lr") {
      try {
        std::size_t used = 0;
        const double lr = std::stod(v, &used);
        if (used != v.size() || lr <= 0.0) throw std::invalid_argument(v);
        av.cfg.train.base_lr = lr;
      } catch (const std::exception&) {
        throw ValidationError("invalid lr value '" + v + "'");
      }
    } else {
      throw ValidationError("unknown sweep axis '" + axis +
                            "' (expected direction|pair_weight|triplet_weight|lr)");
    }
    out.push_back(std::move(av));
  }
  return out;
}

}  // namespace

TrainResult run_single(const RunConfig& cfg, std::uint64_t seed, int threads) {
  TrainParams params = cfg.train;
  params.seed = seed;
  return train(cfg.dataset, cfg.encoder, cfg.surgery, cfg.mining_epsilon, params, cfg.eval_ks,
               threads);
}

void cmd_train(const RunConfig& cfg, int threads) {
  validate_config(cfg);
  const std::vector<SeedOutcome> outcomes = run_all_seeds(cfg, threads);
  write_outputs(cfg, outcomes, false);
}

void cmd_diagram(const RunConfig& cfg, int threads) {
  validate_config(cfg);
  const std::vector<SeedOutcome> outcomes = run_all_seeds(cfg, threads);
  write_outputs(cfg, outcomes, true);
}

void cmd_sweep(const RunConfig& cfg, const std::string& axis,
               const std::vector<std::string>& values, int threads) {
  validate_config(cfg);
  const std::vector<AxisValue> axis_values = resolve_axis(cfg, axis, values);

  struct Cell {
    double recall1 = 0.0;
  };
  const std::size_t seeds = cfg.repeat_seeds.size();
  std::vector<Cell> cells(axis_values.size() * seeds);

  std::vector<RunConfig> run_cfgs;
  for (std::size_t v = 0; v < axis_values.size(); ++v) {
    RunConfig sub = axis_values[v].cfg;
    sub.output_dir =
        (fs::path(cfg.output_dir) / (axis + "=" + axis_values[v].text)).string();
    run_cfgs.push_back(std::move(sub));
  }

  parallel_for(axis_values.size() * seeds, threads, [&](std::size_t flat) {
    const std::size_t v = flat / seeds;
    const std::size_t s = flat % seeds;
    RunConfig one = run_cfgs[v];
    one.repeat_seeds = {cfg.repeat_seeds[s]};
    one.output_dir =
        (fs::path(run_cfgs[v].output_dir) / ("seed=" + std::to_string(cfg.repeat_seeds[s])))
            .string();
    const std::vector<SeedOutcome> outcome = run_all_seeds(one, 1);
    write_outputs(one, outcome, false);
    cells[flat].recall1 = outcome.front().log.final_recall(true, 1);
  });

  std::ostringstream summary;
  summary << "axis,value,runs,mean_holdout_recall_at_1,std_holdout_recall_at_1\n";
  for (std::size_t v = 0; v < axis_values.size(); ++v) {
    double mean = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) mean += cells[v * seeds + s].recall1;
    mean /= static_cast<double>(seeds);
    double var = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const double d = cells[v * seeds + s].recall1 - mean;
      var += d * d;
    }
    const double stddev = seeds > 1 ? std::sqrt(var / static_cast<double>(seeds - 1)) : 0.0;
    summary << axis << ',' << axis_values[v].text << ',' << seeds << ',' << format_double(mean)
            << ',' << format_double(stddev) << "\n";
  }

  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / "summary.csv", summary.str());
}

}  // namespace gradsurg
