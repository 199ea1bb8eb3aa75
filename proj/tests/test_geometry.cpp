#include <cmath>

#include "doctest.h"
#include "gradsurg/geometry.hpp"

using namespace gradsurg;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("normalize scales to unit length") {
  const Embedding e = normalize({3.0, 4.0, 0.0});
  CHECK(e[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(e[2] == 0.0);

  const Embedding unit = normalize({1.0, 0.0, 0.0});
  CHECK(unit[0] == 1.0);
  CHECK(norm(unit.coords()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalize rejects the zero vector") {
  CHECK_THROWS_AS(normalize({0.0, 0.0, 0.0}), ZeroVector);
  CHECK_THROWS_AS(normalize({1e-13, 0.0}), ZeroVector);
}

TEST_CASE("cosine similarity endpoints") {
  const Embedding x = normalize({1.0, 0.0, 0.0});
  const Embedding y = normalize({0.0, 1.0, 0.0});
  CHECK(cosine_similarity(x, y) == 0.0);
  CHECK(cosine_similarity(x, x) == 1.0);

  const Embedding a = normalize({1.0, 0.0});
  const Embedding b = normalize({-1.0, 0.0});
  CHECK(cosine_similarity(a, b) == -1.0);

  CHECK_THROWS_AS(cosine_similarity(x, a), DimensionMismatch);
}

TEST_CASE("euclidean distance endpoints") {
  const Embedding x = normalize({1.0, 0.0, 0.0});
  const Embedding y = normalize({0.0, 1.0, 0.0});
  CHECK(euclidean_distance(x, x) == 0.0);
  CHECK(euclidean_distance(x, y) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  const Embedding nx = normalize({-1.0, 0.0, 0.0});
  CHECK(euclidean_distance(x, nx) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("distance squared equals 2 - 2 cos on random pairs") {
  Rng rng(11);
  for (std::size_t dim : {2u, 8u, 64u}) {
    for (int i = 0; i < 334; ++i) {
      const Embedding u = random_unit(rng, dim);
      const Embedding v = random_unit(rng, dim);
      const double d = euclidean_distance(u, v);
      const double s = cosine_similarity(u, v);
      CHECK(std::abs(d * d - (2.0 - 2.0 * s)) < 1e-9);
    }
  }
}

TEST_CASE("tangent projection removes the radial part") {
  const Embedding f = normalize({1.0, 0.0, 0.0});
  const Vec g{1.0, 1.0, 0.0};
  const Vec t = tangent_project(f, g);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 1.0);
  CHECK(t[2] == 0.0);

  const Vec parallel = tangent_project(f, {2.5, 0.0, 0.0});
  CHECK(norm(parallel) == 0.0);

  const Vec ortho = tangent_project(f, {0.0, -3.0, 1.0});
  CHECK(ortho[1] == -3.0);
  CHECK(ortho[2] == 1.0);
}

TEST_CASE("tangent projection is orthogonal to the base point") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Embedding f = random_unit(rng, 16);
    Vec g(16);
    for (auto& x : g) x = 3.0 * rng.gaussian();
    CHECK(std::abs(dot(tangent_project(f, g), f.coords())) < 1e-12);
  }
}

TEST_CASE("effective strength endpoints and crossing") {
  CHECK(effective_strength(Metric::euclidean, 1.0) == 1.0);
  CHECK(effective_strength(Metric::cosine, 1.0) == 0.0);
  CHECK(effective_strength(Metric::euclidean, 0.0) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(effective_strength(Metric::cosine, 0.0) == 1.0);
  const double crossing = std::sqrt(3.0) / 2.0;
  CHECK(effective_strength(Metric::euclidean, 0.5) == doctest::Approx(crossing).epsilon(1e-12));
  CHECK(effective_strength(Metric::cosine, 0.5) == doctest::Approx(crossing).epsilon(1e-12));
  CHECK_THROWS_AS(effective_strength(Metric::cosine, 1.5), OutOfRange);
}

TEST_CASE("euclidean strength dominates exactly above 0.5") {
  for (int i = -99; i < 100; ++i) {
    const double s = static_cast<double>(i) / 100.0;
    const double e = effective_strength(Metric::euclidean, s);
    const double c = effective_strength(Metric::cosine, s);
    if (s > 0.5) {
      CHECK(e > c);
    } else if (s < 0.5) {
      CHECK(e < c);
    }
  }
  CHECK(std::abs(effective_strength(Metric::euclidean, 0.5) -
                 effective_strength(Metric::cosine, 0.5)) < 1e-9);
}

TEST_CASE("parallel length values") {
  CHECK(parallel_length(Metric::euclidean, PairRole::positive, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(parallel_length(Metric::cosine, PairRole::positive, 0.3) == -0.3);
  CHECK(parallel_length(Metric::cosine, PairRole::negative, 0.3) == 0.3);
  CHECK_THROWS_AS(parallel_length(Metric::euclidean, PairRole::positive, 1.0), Degenerate);
}

TEST_CASE("parallel and effective lengths square to one") {
  for (int i = 0; i <= 2000; ++i) {
    const double s = -1.0 + (2.0 - 1e-6) * static_cast<double>(i) / 2000.0;
    for (Metric metric : {Metric::euclidean, Metric::cosine}) {
      for (PairRole role : {PairRole::positive, PairRole::negative}) {
        const double l = parallel_length(metric, role, s);
        const double e = effective_strength(metric, s);
        CHECK(std::abs(l * l + e * e - 1.0) < 1e-9);
      }
    }
  }
}

TEST_SUITE_END();
