#include <cmath>

#include "doctest.h"
#include "gradsurg/evaluation.hpp"

using namespace gradsurg;

namespace {

Embedding planar(double angle_deg) {
  const double a = angle_deg * 3.14159265358979323846 / 180.0;
  return normalize({std::cos(a), std::sin(a)});
}

}  // namespace

TEST_SUITE_BEGIN("evaluation");

TEST_CASE("two tight clusters retrieve perfectly") {
  const std::vector<Embedding> embs{planar(0), planar(2), planar(90), planar(92)};
  const std::vector<int> labels{0, 0, 1, 1};
  const RecallReport report = recall_at_k(embs, labels, {1, 2});
  CHECK(report.recall[0] == 1.0);
  CHECK(report.recall[1] == 1.0);
}

TEST_CASE("alternating neighbors retrieve nothing at k = 1") {
  const std::vector<Embedding> embs{planar(0), planar(10), planar(20), planar(30)};
  const std::vector<int> labels{0, 1, 0, 1};
  const RecallReport report = recall_at_k(embs, labels, {1});
  CHECK(report.recall[0] == 0.0);
}

TEST_CASE("half the queries find a neighbor") {
  // 0 and 3 have same-class nearest neighbors; 1 and 2 are mutual nearest
  // neighbors across classes.
  const std::vector<Embedding> embs{planar(0), planar(5), planar(8), planar(60)};
  const std::vector<int> labels{0, 0, 1, 1};
  const RecallReport report = recall_at_k(embs, labels, {1});
  CHECK(report.recall[0] == 0.5);
}

TEST_CASE("recall rejects out-of-range cutoffs") {
  const std::vector<Embedding> embs{planar(0), planar(10), planar(20)};
  const std::vector<int> labels{0, 0, 1};
  CHECK_THROWS_AS(recall_at_k(embs, labels, {3}), KTooLarge);
  CHECK_THROWS_AS(recall_at_k(embs, labels, {0}), OutOfRange);
}

TEST_CASE("recall is nondecreasing in k") {
  Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Embedding> embs;
    std::vector<int> labels;
    const std::size_t n = 6 + rng.index(6);
    for (std::size_t i = 0; i < n; ++i) {
      embs.push_back(random_unit(rng, 4));
      labels.push_back(static_cast<int>(rng.index(3)));
    }
    // Ensure no class is missing entirely for query sanity.
    labels[0] = 0;
    labels[1] = 0;
    std::vector<int> ks;
    for (std::size_t k = 1; k < n; ++k) ks.push_back(static_cast<int>(k));
    const RecallReport report = recall_at_k(embs, labels, ks);
    for (std::size_t i = 1; i < report.recall.size(); ++i) {
      CHECK(report.recall[i] >= report.recall[i - 1]);
    }
  }
}

TEST_CASE("diagram separates clustered data") {
  const std::vector<Embedding> embs{planar(0), planar(2), planar(120), planar(122)};
  const std::vector<int> labels{0, 0, 1, 1};
  const std::vector<DiagramRow> rows = triplet_diagram(embs, labels);
  CHECK(rows.size() == embs.size());
  for (const auto& row : rows) {
    CHECK(row.s_np > 0.99);
    CHECK(row.s_nn < 0.0);
    CHECK(row.s_np <= 1.0);
    CHECK(row.s_nn >= -1.0);
  }
}

TEST_CASE("diagram flags hard negatives") {
  // Sample 0's nearest different-class neighbor (5 degrees) is closer than
  // its nearest same-class neighbor (30 degrees).
  const std::vector<Embedding> embs{planar(0), planar(30), planar(5), planar(100)};
  const std::vector<int> labels{0, 0, 1, 1};
  const std::vector<DiagramRow> rows = triplet_diagram(embs, labels);
  CHECK(rows[0].s_nn > rows[0].s_np);
}

TEST_CASE("duplicated sample has unit nearest-positive similarity") {
  const std::vector<Embedding> embs{planar(40), planar(40), planar(170), planar(200)};
  const std::vector<int> labels{0, 0, 1, 1};
  const std::vector<DiagramRow> rows = triplet_diagram(embs, labels);
  CHECK(std::abs(rows[0].s_np - 1.0) < 1e-9);
  CHECK(std::abs(rows[1].s_np - 1.0) < 1e-9);
}

TEST_CASE("diagram rejects degenerate layouts") {
  const std::vector<Embedding> embs{planar(0), planar(10), planar(20)};
  CHECK_THROWS_AS(triplet_diagram(embs, {0, 0, 0}), DegenerateBatch);
  CHECK_THROWS_AS(triplet_diagram(embs, {0, 0, 1}), DegenerateBatch);
}

TEST_SUITE_END();
