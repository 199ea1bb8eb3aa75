#include "gradsurg/training.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gradsurg/parallel.hpp"
#include "gradsurg/rng.hpp"

namespace gradsurg {

namespace {

Vec random_gaussian(Rng& rng, int dim, double scale) {
  Vec v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = scale * rng.gaussian();
  return v;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void check_finite_update(const TripletUpdate& up, int a, int p, int n) {
  if (!all_finite(up.g_a) || !all_finite(up.g_p) || !all_finite(up.g_n)) {
    throw NonFiniteGradient("non-finite update for triplet (" + std::to_string(a) + ", " +
                            std::to_string(p) + ", " + std::to_string(n) + ")");
  }
}

}  // namespace

std::vector<int> Dataset::split_ids(bool holdout_split) const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if ((holdout[i] != 0) == holdout_split) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

Dataset generate_dataset(const SyntheticSpec& spec) {
  Rng rng(mix_seed(spec.seed, 0xda7a5e7ULL));

  std::vector<Embedding> prototypes;
  prototypes.reserve(static_cast<std::size_t>(spec.num_classes));
  for (int c = 0; c < spec.num_classes; ++c) {
    prototypes.push_back(random_unit(rng, static_cast<std::size_t>(spec.input_dim)));
  }

  Dataset data;
  const int first_holdout = spec.num_classes - spec.holdout_classes;
  // noise_sigma is the scale of the noise vector relative to the unit
  // prototype, so the per-component deviation shrinks with dimension.
  const double component_sigma =
      spec.noise_sigma / std::sqrt(static_cast<double>(spec.input_dim));
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int s = 0; s < spec.samples_per_class; ++s) {
      Vec x = prototypes[static_cast<std::size_t>(c)].coords();
      for (auto& xi : x) xi += component_sigma * rng.gaussian();
      data.inputs.push_back(Embedding::normalize(x).coords());
      data.labels.push_back(c);
      data.holdout.push_back(c >= first_holdout ? 1 : 0);
    }
  }
  return data;
}

const char* to_string(EncoderKind k) { return k == EncoderKind::table ? "table" : "linear"; }

std::optional<EncoderKind> parse_encoder_kind(std::string_view s) {
  if (s == "table") return EncoderKind::table;
  if (s == "linear") return EncoderKind::linear;
  return std::nullopt;
}

const char* to_string(Aggregate a) { return a == Aggregate::mean ? "mean" : "sum"; }

std::optional<Aggregate> parse_aggregate(std::string_view s) {
  if (s == "mean") return Aggregate::mean;
  if (s == "sum") return Aggregate::sum;
  return std::nullopt;
}

Encoder Encoder::init(const EncoderSpec& spec, int input_dim, int num_samples,
                      std::uint64_t seed) {
  Encoder enc;
  enc.spec_ = spec;
  enc.input_dim_ = input_dim;
  Rng rng(mix_seed(seed, 0xe2c0de1ULL));
  if (spec.kind == EncoderKind::table) {
    enc.table_.reserve(static_cast<std::size_t>(num_samples));
    for (int i = 0; i < num_samples; ++i) {
      enc.table_.push_back(random_unit(rng, static_cast<std::size_t>(spec.embed_dim)).coords());
    }
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    enc.weight_.reserve(static_cast<std::size_t>(spec.embed_dim));
    for (int r = 0; r < spec.embed_dim; ++r) {
      enc.weight_.push_back(random_gaussian(rng, input_dim, scale));
    }
  }
  return enc;
}

Embedding Encoder::forward_one(const Dataset& data, int sample_id) const {
  const auto id = static_cast<std::size_t>(sample_id);
  if (spec_.kind == EncoderKind::table) {
    return Embedding::normalize(table_[id]);
  }
  Vec v(weight_.size());
  const Vec& x = data.inputs[id];
  for (std::size_t r = 0; r < weight_.size(); ++r) v[r] = dot(weight_[r], x);
  if (norm(v) <= 1e-12) {
    throw ZeroVector("encoder output underflow for sample " + std::to_string(sample_id));
  }
  return Embedding::normalize(v);
}

std::vector<Embedding> Encoder::forward(const Dataset& data,
                                        const std::vector<int>& sample_ids) const {
  std::vector<Embedding> out;
  out.reserve(sample_ids.size());
  for (int id : sample_ids) out.push_back(forward_one(data, id));
  return out;
}

std::vector<Embedding> Encoder::forward_all(const Dataset& data) const {
  std::vector<int> ids(data.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  return forward(data, ids);
}

void Encoder::apply_updates(const Dataset& data, const std::vector<int>& sample_ids,
                            const std::vector<Vec>& grads, double lr) {
  if (sample_ids.size() != grads.size()) {
    throw DimensionMismatch("sample ids and gradients differ in length");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!all_finite(grads[i])) {
      throw NonFiniteGradient("non-finite gradient for sample " +
                              std::to_string(sample_ids[i]));
    }
  }

  if (spec_.kind == EncoderKind::table) {
    for (std::size_t i = 0; i < sample_ids.size(); ++i) {
      Vec& param = table_[static_cast<std::size_t>(sample_ids[i])];
      // Rows are kept exactly unit length, so the Jacobian scale is 1 and the
      // pulled gradient is orthogonal to the row; the step can only grow the
      // norm, never underflow it.
      const Embedding f = Embedding::normalize(param);
      const Vec pulled = tangent_project(f, grads[i]);
      axpy(-lr, pulled, param);
      param = Embedding::normalize(param).coords();
    }
    return;
  }

  // Linear mode: accumulate the full weight gradient with the parameters
  // frozen, then apply once.
  std::vector<Vec> delta(weight_.size(), Vec(static_cast<std::size_t>(input_dim_), 0.0));
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    const auto id = static_cast<std::size_t>(sample_ids[i]);
    const Vec& x = data.inputs[id];
    Vec v(weight_.size());
    for (std::size_t r = 0; r < weight_.size(); ++r) v[r] = dot(weight_[r], x);
    const double vn = norm(v);
    if (vn <= 1e-12) {
      throw ZeroVector("encoder output underflow for sample " + std::to_string(sample_ids[i]));
    }
    const Embedding f = Embedding::normalize(v);
    Vec pulled = tangent_project(f, grads[i]);
    for (auto& e : pulled) e /= vn;
    for (std::size_t r = 0; r < weight_.size(); ++r) {
      axpy(pulled[r], x, delta[r]);
    }
  }
  for (std::size_t r = 0; r < weight_.size(); ++r) {
    axpy(-lr, delta[r], weight_[r]);
  }
}

double lr_at(int epoch, const TrainParams& params) {
  const int milestone =
      static_cast<int>(std::floor(params.epochs * params.lr_milestone_frac));
  return epoch < milestone ? params.base_lr : params.base_lr * params.lr_step_factor;
}

double TrainLog::final_recall(bool holdout_split, int k) const {
  if (epochs.empty()) return 0.0;
  const auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) throw OutOfRange("recall cutoff " + std::to_string(k) + " was not logged");
  const auto idx = static_cast<std::size_t>(it - ks.begin());
  const EpochRecord& last = epochs.back();
  return holdout_split ? last.recall_holdout[idx] : last.recall_train[idx];
}

TrainResult train(const SyntheticSpec& data_spec, const EncoderSpec& encoder_spec,
                  const SurgeryConfig& surgery, double mining_epsilon, const TrainParams& params,
                  const std::vector<int>& eval_ks, int threads) {
  Dataset data = generate_dataset(data_spec);
  const std::vector<int> train_ids = data.split_ids(false);
  const std::vector<int> holdout_ids = data.split_ids(true);

  std::vector<int> train_labels;
  train_labels.reserve(train_ids.size());
  for (int id : train_ids) train_labels.push_back(data.labels[static_cast<std::size_t>(id)]);

  Encoder encoder = Encoder::init(encoder_spec, data_spec.input_dim,
                                  static_cast<int>(data.size()), params.seed);

  TrainLog log;
  {
    std::set<int> ks(eval_ks.begin(), eval_ks.end());
    ks.insert(1);
    log.ks.assign(ks.begin(), ks.end());
  }

  const int batch_size = params.batch.classes_per_batch * params.batch.samples_per_class;
  const int steps_per_epoch =
      std::max(1, static_cast<int>(train_ids.size()) / std::max(1, batch_size));
  const auto ms_form = relative_form_for(surgery.pair_weight);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const double lr = lr_at(epoch, params);
    double sum_s_ap = 0.0;
    double sum_s_an = 0.0;
    double sum_loss = 0.0;
    std::size_t triplet_count = 0;

    for (int step = 0; step < steps_per_epoch; ++step) {
      const std::uint64_t batch_seed =
          mix_seed(mix_seed(params.seed, static_cast<std::uint64_t>(epoch)),
                   static_cast<std::uint64_t>(step));
      const std::vector<int> local = make_batch(train_labels, params.batch, batch_seed);
      std::vector<int> batch_ids(local.size());
      std::vector<int> batch_labels(local.size());
      for (std::size_t i = 0; i < local.size(); ++i) {
        batch_ids[i] = train_ids[static_cast<std::size_t>(local[i])];
        batch_labels[i] = data.labels[static_cast<std::size_t>(batch_ids[i])];
      }

      const std::vector<Embedding> embs = encoder.forward(data, batch_ids);
      const std::vector<MiningContext> contexts = mine_batch(embs, batch_labels, mining_epsilon);

      std::vector<TripletUpdate> updates(contexts.size());
      parallel_for(contexts.size(), threads, [&](std::size_t i) {
        const MiningContext& ctx = contexts[i];
        const RelativeStats rel =
            ms_form ? relative_stats(*ms_form, ctx.sims, ctx.set_p, ctx.set_n, surgery)
                    : empty_relative_stats(RelativeForm::sigmoid);
        updates[i] = compose(surgery, embs[static_cast<std::size_t>(ctx.anchor_index)],
                             embs[static_cast<std::size_t>(ctx.positive_index)],
                             embs[static_cast<std::size_t>(ctx.negative_index)], rel);
      });

      // Fixed ascending-triplet reduction keeps results bitwise reproducible
      // for any worker count.
      std::vector<Vec> acc(batch_ids.size(),
                           Vec(static_cast<std::size_t>(encoder_spec.embed_dim), 0.0));
      for (std::size_t i = 0; i < contexts.size(); ++i) {
        const MiningContext& ctx = contexts[i];
        check_finite_update(updates[i], batch_ids[static_cast<std::size_t>(ctx.anchor_index)],
                            batch_ids[static_cast<std::size_t>(ctx.positive_index)],
                            batch_ids[static_cast<std::size_t>(ctx.negative_index)]);
        axpy(1.0, updates[i].g_a, acc[static_cast<std::size_t>(ctx.anchor_index)]);
        axpy(1.0, updates[i].g_p, acc[static_cast<std::size_t>(ctx.positive_index)]);
        axpy(1.0, updates[i].g_n, acc[static_cast<std::size_t>(ctx.negative_index)]);
        sum_s_ap += ctx.sims.s_ap;
        sum_s_an += ctx.sims.s_an;
        sum_loss += softplus(ctx.sims.s_an - ctx.sims.s_ap);
      }
      triplet_count += contexts.size();

      if (params.aggregate == Aggregate::mean && !contexts.empty()) {
        const double inv = 1.0 / static_cast<double>(contexts.size());
        for (auto& g : acc) {
          for (auto& e : g) e *= inv;
        }
      }
      encoder.apply_updates(data, batch_ids, acc, lr);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    const double denom = triplet_count > 0 ? static_cast<double>(triplet_count) : 1.0;
    rec.loss_proxy = sum_loss / denom;
    rec.mean_s_ap = sum_s_ap / denom;
    rec.mean_s_an = sum_s_an / denom;

    const std::vector<Embedding> all = encoder.forward_all(data);
    std::vector<Embedding> train_embs;
    std::vector<int> train_lbls;
    for (int id : train_ids) {
      train_embs.push_back(all[static_cast<std::size_t>(id)]);
      train_lbls.push_back(data.labels[static_cast<std::size_t>(id)]);
    }
    std::vector<Embedding> hold_embs;
    std::vector<int> hold_lbls;
    for (int id : holdout_ids) {
      hold_embs.push_back(all[static_cast<std::size_t>(id)]);
      hold_lbls.push_back(data.labels[static_cast<std::size_t>(id)]);
    }
    rec.recall_train = recall_at_k(train_embs, train_lbls, log.ks).recall;
    rec.recall_holdout = holdout_ids.empty()
                             ? std::vector<double>(log.ks.size(), 0.0)
                             : recall_at_k(hold_embs, hold_lbls, log.ks).recall;
    log.epochs.push_back(std::move(rec));
  }

  return TrainResult{std::move(log), std::move(encoder), std::move(data)};
}

}  // namespace gradsurg
