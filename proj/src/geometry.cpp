#include "gradsurg/geometry.hpp"

#include <cmath>

namespace gradsurg {

namespace {

void require_same_dim(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("vector dimensions differ: " + std::to_string(u.size()) +
                            " vs " + std::to_string(v.size()));
  }
}

}  // namespace

double dot(const Vec& u, const Vec& v) {
  require_same_dim(u, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec scaled(const Vec& v, double k) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = k * v[i];
  return out;
}

Vec sub(const Vec& u, const Vec& v) {
  require_same_dim(u, v);
  Vec out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
  return out;
}

void axpy(double k, const Vec& x, Vec& y) {
  require_same_dim(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += k * x[i];
}

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double clamp_similarity(double s) {
  if (std::abs(s) > 1.0 + 1e-12) {
    throw OutOfRange("similarity out of [-1,1]: " + std::to_string(s));
  }
  return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
}

Embedding Embedding::normalize(const Vec& v) {
  const double n = gradsurg::norm(v);
  if (n <= 1e-12) {
    throw ZeroVector("cannot normalize a vector with norm " + std::to_string(n));
  }
  return Embedding(scaled(v, 1.0 / n));
}

SimilarityPair make_similarity_pair(double s_ap, double s_an) {
  return SimilarityPair{clamp_similarity(s_ap), clamp_similarity(s_an)};
}

double cosine_similarity(const Embedding& u, const Embedding& v) {
  return clamp_similarity(dot(u.coords(), v.coords()));
}

double euclidean_distance(const Embedding& u, const Embedding& v) {
  const double s = cosine_similarity(u, v);
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * s));
}

Vec tangent_project(const Embedding& f, const Vec& g) {
  require_same_dim(f.coords(), g);
  const double radial = dot(f.coords(), g);
  Vec out = g;
  axpy(-radial, f.coords(), out);
  return out;
}

double effective_strength(Metric kind, double s) {
  s = clamp_similarity(s);
  if (kind == Metric::euclidean) {
    return std::sqrt((1.0 + s) / 2.0);
  }
  return std::sqrt(std::max(0.0, (1.0 - s) * (1.0 + s)));
}

double parallel_length(Metric kind, PairRole role, double s) {
  s = clamp_similarity(s);
  if (kind == Metric::cosine) {
    return role == PairRole::positive ? -s : s;
  }
  if (s >= 1.0 - 1e-12) {
    throw Degenerate("coincident pair: no displacement direction at similarity " +
                     std::to_string(s));
  }
  const double l = (1.0 - s) / std::sqrt(2.0 - 2.0 * s);
  return role == PairRole::positive ? l : -l;
}

Embedding random_unit(Rng& rng, std::size_t dim) {
  Vec v(dim);
  while (true) {
    for (auto& x : v) x = rng.gaussian();
    if (norm(v) > 1e-12) break;  // redraw the astronomically unlikely underflow
  }
  return Embedding::normalize(v);
}

std::vector<double> similarity_matrix(const std::vector<Embedding>& items) {
  const std::size_t n = items.size();
  std::vector<double> sims(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    sims[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = cosine_similarity(items[i], items[j]);
      sims[i * n + j] = s;
      sims[j * n + i] = s;
    }
  }
  return sims;
}

}  // namespace gradsurg
