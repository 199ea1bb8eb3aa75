#include "gradsurg/mining.hpp"

#include <algorithm>
#include <map>

#include "gradsurg/rng.hpp"

namespace gradsurg {

namespace {

void check_minable(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int l : labels) counts[l]++;
  if (counts.size() < 2) {
    throw DegenerateBatch("mining needs at least two classes, got " +
                          std::to_string(counts.size()));
  }
  for (const auto& [label, count] : counts) {
    if (count < 2) {
      throw DegenerateBatch("class " + std::to_string(label) + " has a single sample");
    }
  }
}

// argmax over candidates selected by `keep`, ties toward the lower index.
int argmax_similarity(const std::vector<double>& sims, std::size_t n, std::size_t row,
                      const std::vector<int>& labels, int anchor_label, bool same_class) {
  int best = -1;
  double best_sim = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == row) continue;
    if ((labels[j] == anchor_label) != same_class) continue;
    const double s = sims[row * n + j];
    if (best < 0 || s > best_sim) {
      best = static_cast<int>(j);
      best_sim = s;
    }
  }
  return best;
}

}  // namespace

std::vector<int> make_batch(const std::vector<int>& labels, const BatchSpec& spec,
                            std::uint64_t seed) {
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<int>(i));
  }

  std::vector<int> eligible;
  for (const auto& [label, ids] : by_class) {
    if (static_cast<int>(ids.size()) >= spec.samples_per_class) eligible.push_back(label);
  }
  if (static_cast<int>(eligible.size()) < spec.classes_per_batch) {
    throw InsufficientData("need " + std::to_string(spec.classes_per_batch) + " classes with >= " +
                           std::to_string(spec.samples_per_class) + " samples, found " +
                           std::to_string(eligible.size()));
  }

  Rng rng(seed);
  rng.shuffle(eligible);
  eligible.resize(spec.classes_per_batch);

  std::vector<int> batch;
  batch.reserve(static_cast<std::size_t>(spec.classes_per_batch) * spec.samples_per_class);
  for (int label : eligible) {
    std::vector<int> ids = by_class[label];
    rng.shuffle(ids);
    ids.resize(spec.samples_per_class);
    batch.insert(batch.end(), ids.begin(), ids.end());
  }
  return batch;
}

std::vector<TripletIndices> ephn_triplets(const std::vector<Embedding>& embeddings,
                                          const std::vector<int>& labels) {
  if (embeddings.size() != labels.size()) {
    throw DimensionMismatch("embeddings and labels differ in length");
  }
  check_minable(labels);

  const std::size_t n = embeddings.size();
  const std::vector<double> sims = similarity_matrix(embeddings);

  std::vector<TripletIndices> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    out[a].anchor = static_cast<int>(a);
    out[a].positive = argmax_similarity(sims, n, a, labels, labels[a], true);
    out[a].negative = argmax_similarity(sims, n, a, labels, labels[a], false);
  }
  return out;
}

RelativeSets relative_sets(SimilarityPair sims, const std::vector<double>& relative_pos,
                           const std::vector<double>& relative_neg, double epsilon) {
  double neg_ceiling = sims.s_an;
  for (double r : relative_neg) neg_ceiling = std::max(neg_ceiling, r);
  double pos_floor = sims.s_ap;
  for (double r : relative_pos) pos_floor = std::min(pos_floor, r);

  RelativeSets out;
  for (double r : relative_pos) {
    if (r < neg_ceiling + epsilon) out.set_p.push_back(r);
  }
  for (double r : relative_neg) {
    if (r > pos_floor - epsilon) out.set_n.push_back(r);
  }
  return out;
}

std::vector<MiningContext> mine_batch(const std::vector<Embedding>& embeddings,
                                      const std::vector<int>& labels, double epsilon) {
  const std::vector<TripletIndices> triplets = ephn_triplets(embeddings, labels);
  const std::size_t n = embeddings.size();
  const std::vector<double> sims = similarity_matrix(embeddings);

  std::vector<MiningContext> out(triplets.size());
  for (std::size_t a = 0; a < triplets.size(); ++a) {
    MiningContext& ctx = out[a];
    ctx.anchor_index = triplets[a].anchor;
    ctx.positive_index = triplets[a].positive;
    ctx.negative_index = triplets[a].negative;
    ctx.sims.s_ap = sims[a * n + ctx.positive_index];
    ctx.sims.s_an = sims[a * n + ctx.negative_index];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      const bool same = labels[j] == labels[a];
      if (same && static_cast<int>(j) != ctx.positive_index) {
        ctx.relative_pos.push_back(sims[a * n + j]);
      } else if (!same && static_cast<int>(j) != ctx.negative_index) {
        ctx.relative_neg.push_back(sims[a * n + j]);
      }
    }
    RelativeSets sets = relative_sets(ctx.sims, ctx.relative_pos, ctx.relative_neg, epsilon);
    ctx.set_p = std::move(sets.set_p);
    ctx.set_n = std::move(sets.set_n);
  }
  return out;
}

}  // namespace gradsurg
