#pragma once

#include <vector>

#include "gradsurg/geometry.hpp"

namespace gradsurg {

// Recall fractions for a list of cutoffs, nondecreasing in K.
struct RecallReport {
  std::vector<int> ks;
  std::vector<double> recall;  // aligned with ks
};

// Fraction of samples whose K nearest neighbors (by similarity, descending,
// ties toward the lower index, self excluded) contain a same-class sample.
RecallReport recall_at_k(const std::vector<Embedding>& embeddings, const std::vector<int>& labels,
                         const std::vector<int>& ks);

// Per-anchor nearest-positive and nearest-negative similarities; points with
// s_nn > s_np are the hard-negative cases.
struct DiagramRow {
  int anchor_id = -1;
  double s_np = 0.0;
  double s_nn = 0.0;
};

std::vector<DiagramRow> triplet_diagram(const std::vector<Embedding>& embeddings,
                                        const std::vector<int>& labels);

}  // namespace gradsurg
