#include "gradsurg/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace gradsurg {

RecallReport recall_at_k(const std::vector<Embedding>& embeddings, const std::vector<int>& labels,
                         const std::vector<int>& ks) {
  if (embeddings.size() != labels.size()) {
    throw DimensionMismatch("embeddings and labels differ in length");
  }
  const std::size_t n = embeddings.size();
  if (n < 2) throw KTooLarge("retrieval needs at least two samples");
  for (int k : ks) {
    if (k < 1) throw OutOfRange("recall cutoff must be positive, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) >= n) {
      throw KTooLarge("cutoff " + std::to_string(k) + " not below sample count " +
                      std::to_string(n));
    }
  }

  const std::vector<double> sims = similarity_matrix(embeddings);

  // Rank of the first same-class neighbor per query (1-based); recall@K is
  // then the fraction of queries with rank <= K.
  std::vector<std::size_t> first_hit(n, n);
  std::vector<int> order(n);
  for (std::size_t q = 0; q < n; ++q) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(q));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double sa = sims[q * n + a];
      const double sb = sims[q * n + b];
      if (sa != sb) return sa > sb;
      return a < b;
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (labels[order[r]] == labels[q]) {
        first_hit[q] = r + 1;
        break;
      }
    }
  }

  RecallReport report;
  report.ks = ks;
  for (int k : ks) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (first_hit[q] <= static_cast<std::size_t>(k)) ++hits;
    }
    report.recall.push_back(static_cast<double>(hits) / static_cast<double>(n));
  }
  return report;
}

std::vector<DiagramRow> triplet_diagram(const std::vector<Embedding>& embeddings,
                                        const std::vector<int>& labels) {
  if (embeddings.size() != labels.size()) {
    throw DimensionMismatch("embeddings and labels differ in length");
  }
  std::map<int, int> counts;
  for (int l : labels) counts[l]++;
  if (counts.size() < 2) throw DegenerateBatch("diagram needs at least two classes");
  for (const auto& [label, count] : counts) {
    if (count < 2) {
      throw DegenerateBatch("class " + std::to_string(label) + " has a single sample");
    }
  }

  const std::size_t n = embeddings.size();
  const std::vector<double> sims = similarity_matrix(embeddings);

  std::vector<DiagramRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].anchor_id = static_cast<int>(i);
    double best_pos = -2.0;
    double best_neg = -2.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double s = sims[i * n + j];
      if (labels[j] == labels[i]) {
        best_pos = std::max(best_pos, s);
      } else {
        best_neg = std::max(best_neg, s);
      }
    }
    rows[i].s_np = best_pos;
    rows[i].s_nn = best_neg;
  }
  return rows;
}

}  // namespace gradsurg
