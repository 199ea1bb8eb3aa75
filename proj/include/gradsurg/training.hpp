#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradsurg/evaluation.hpp"
#include "gradsurg/mining.hpp"
#include "gradsurg/surgery.hpp"

namespace gradsurg {

// Synthetic clustered data: class prototypes on the unit sphere, samples as
// renormalized noisy copies. The last holdout_classes classes form the
// unseen-class evaluation split.
struct SyntheticSpec {
  int num_classes = 30;
  int samples_per_class = 8;
  int input_dim = 32;
  double noise_sigma = 0.35;
  int holdout_classes = 10;
  std::uint64_t seed = 1;
};

struct Dataset {
  std::vector<Vec> inputs;    // unit rows of length input_dim
  std::vector<int> labels;
  std::vector<char> holdout;  // 1 = holdout split

  std::size_t size() const { return inputs.size(); }
  std::vector<int> split_ids(bool holdout_split) const;
};

Dataset generate_dataset(const SyntheticSpec& spec);

enum class EncoderKind { table, linear };

const char* to_string(EncoderKind k);
std::optional<EncoderKind> parse_encoder_kind(std::string_view s);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::linear;
  int embed_dim = 8;  // d, >= 2
};

// Embedding producer. Table mode keeps one free unit vector per sample;
// linear mode maps inputs through a single weight matrix. Both renormalize,
// and updates are pulled through the normalization before they touch the
// parameters.
class Encoder {
 public:
  static Encoder init(const EncoderSpec& spec, int input_dim, int num_samples,
                      std::uint64_t seed);

  Embedding forward_one(const Dataset& data, int sample_id) const;
  std::vector<Embedding> forward(const Dataset& data, const std::vector<int>& sample_ids) const;
  std::vector<Embedding> forward_all(const Dataset& data) const;

  // One descent step from per-sample gradients at the embeddings. grads[i]
  // belongs to sample_ids[i]; each is pulled through the normalization
  // Jacobian before the parameter update.
  void apply_updates(const Dataset& data, const std::vector<int>& sample_ids,
                     const std::vector<Vec>& grads, double lr);

  const EncoderSpec& spec() const { return spec_; }
  const std::vector<Vec>& table() const { return table_; }
  const std::vector<Vec>& weight() const { return weight_; }
  std::vector<Vec>& mutable_table() { return table_; }
  std::vector<Vec>& mutable_weight() { return weight_; }

 private:
  Encoder() = default;
  EncoderSpec spec_;
  int input_dim_ = 0;
  std::vector<Vec> table_;   // table mode: one unit row per sample
  std::vector<Vec> weight_;  // linear mode: embed_dim rows of input_dim
};

enum class Aggregate { mean, sum };

const char* to_string(Aggregate a);
std::optional<Aggregate> parse_aggregate(std::string_view s);

struct TrainParams {
  int epochs = 60;
  BatchSpec batch;
  double base_lr = 0.5;
  double lr_step_factor = 0.1;      // multiplier applied at the milestone
  double lr_milestone_frac = 0.6;   // fraction of total epochs
  std::uint64_t seed = 1;
  Aggregate aggregate = Aggregate::mean;
};

// Stepped schedule: base_lr before floor(epochs * milestone_frac), stepped
// down by lr_step_factor from that epoch onward.
double lr_at(int epoch, const TrainParams& params);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double loss_proxy = 0.0;  // mean softplus(s_an - s_ap) over mined triplets
  double mean_s_ap = 0.0;
  double mean_s_an = 0.0;
  std::vector<double> recall_train;    // aligned with TrainLog.ks
  std::vector<double> recall_holdout;
};

struct TrainLog {
  std::vector<int> ks;  // evaluation cutoffs; always contains 1
  std::vector<EpochRecord> epochs;

  double final_recall(bool holdout_split, int k) const;
};

struct TrainResult {
  TrainLog log;
  Encoder encoder;
  Dataset dataset;
};

// Full experiment loop: sample batch, embed, mine, compose, aggregate, step;
// per-epoch retrieval evaluation on both splits. Deterministic for fixed
// seeds regardless of the thread count.
TrainResult train(const SyntheticSpec& data_spec, const EncoderSpec& encoder_spec,
                  const SurgeryConfig& surgery, double mining_epsilon, const TrainParams& params,
                  const std::vector<int>& eval_ks, int threads = 1);

}  // namespace gradsurg
