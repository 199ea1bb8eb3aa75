#pragma once

#include <cstdint>
#include <vector>

#include "gradsurg/geometry.hpp"

namespace gradsurg {

// Batch layout: C distinct classes with N samples each.
struct BatchSpec {
  int classes_per_batch = 8;  // C, >= 2
  int samples_per_class = 8;  // N, >= 2
};

struct TripletIndices {
  int anchor = -1;
  int positive = -1;
  int negative = -1;
};

// Draws C classes (among those with at least N samples) and N samples per
// class, without replacement. Deterministic for a given seed; returns indices
// into `labels`, grouped by class.
std::vector<int> make_batch(const std::vector<int>& labels, const BatchSpec& spec,
                            std::uint64_t seed);

// Easy-positive, hard-negative selection: every sample serves as anchor once;
// its positive is the most similar same-class sample, its negative the most
// similar different-class sample. Ties break toward the lower index.
std::vector<TripletIndices> ephn_triplets(const std::vector<Embedding>& embeddings,
                                          const std::vector<int>& labels);

struct RelativeSets {
  std::vector<double> set_p;
  std::vector<double> set_n;
};

// Filters the relative-similarity pools down to the informative members:
// positives not yet separated from the hardest negative (plus epsilon slack)
// and negatives not yet separated from the easiest positive.
RelativeSets relative_sets(SimilarityPair sims, const std::vector<double>& relative_pos,
                           const std::vector<double>& relative_neg, double epsilon);

// Everything the composer needs for one mined triplet. The selected pair
// similarities are excluded from their own relative pools.
struct MiningContext {
  int anchor_index = -1;
  int positive_index = -1;
  int negative_index = -1;
  SimilarityPair sims;
  std::vector<double> relative_pos;
  std::vector<double> relative_neg;
  std::vector<double> set_p;
  std::vector<double> set_n;
};

// Full per-batch mining: selection, pools, and relative sets in one pass over
// the similarity matrix.
std::vector<MiningContext> mine_batch(const std::vector<Embedding>& embeddings,
                                      const std::vector<int>& labels, double epsilon);

}  // namespace gradsurg
