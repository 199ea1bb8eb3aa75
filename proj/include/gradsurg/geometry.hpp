#pragma once

#include <cstddef>
#include <vector>

#include "gradsurg/error.hpp"
#include "gradsurg/rng.hpp"

namespace gradsurg {

using Vec = std::vector<double>;

// Plain dense-vector helpers; only what the gradient formulas need.
double dot(const Vec& u, const Vec& v);
double norm(const Vec& v);
Vec scaled(const Vec& v, double k);
Vec sub(const Vec& u, const Vec& v);
void axpy(double k, const Vec& x, Vec& y);  // y += k * x
bool all_finite(const Vec& v);

// Clamps a similarity into [-1, 1]; values beyond a 1e-12 slack are rejected
// with OutOfRange rather than silently clamped.
double clamp_similarity(double s);

// An L2-normalized feature vector. Construction goes through normalize(), so
// the unit-norm invariant holds for every live instance.
class Embedding {
 public:
  static Embedding normalize(const Vec& v);  // ZeroVector if ||v|| <= 1e-12

  const Vec& coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  explicit Embedding(Vec c) : coords_(std::move(c)) {}
  Vec coords_;
};

inline Embedding normalize(const Vec& v) { return Embedding::normalize(v); }

// Similarities of the selected anchor-positive and anchor-negative pairs.
struct SimilarityPair {
  double s_ap = 0.0;
  double s_an = 0.0;
};

SimilarityPair make_similarity_pair(double s_ap, double s_an);

double cosine_similarity(const Embedding& u, const Embedding& v);

// ||u - v|| for unit vectors, computed as sqrt(2 - 2*cos); always in [0, 2].
double euclidean_distance(const Embedding& u, const Embedding& v);

// Component of g orthogonal to f: g - (f.g) f.
Vec tangent_project(const Embedding& f, const Vec& g);

enum class Metric { euclidean, cosine };
enum class PairRole { positive, negative };

// Length of the unit update direction's component orthogonal to the moved
// feature: the part that actually changes the pair angle. s is the pair
// similarity.
double effective_strength(Metric kind, double s);

// Length of the component along the moved feature. Squares with
// effective_strength to 1. Euclidean needs a non-coincident pair.
double parallel_length(Metric kind, PairRole role, double s);

// Uniform draw from the unit sphere (gaussian direction, renormalized).
Embedding random_unit(Rng& rng, std::size_t dim);

// Row-major n*n matrix of pairwise similarities, diagonal included.
std::vector<double> similarity_matrix(const std::vector<Embedding>& items);

}  // namespace gradsurg
