#include <cmath>

#include "doctest.h"
#include "gradsurg/losses.hpp"
#include "gradsurg/surgery.hpp"

using namespace gradsurg;

namespace {

const Embedding kA = normalize({1.0, 0.0, 0.0});
const Embedding kP = normalize({0.0, 1.0, 0.0});
const Embedding kN = normalize({0.0, 0.0, 1.0});

SurgeryConfig make_cfg(DirectionKind d, PairWeightKind p, TripletWeightKind t,
                       MaskKind m = MaskKind::none) {
  SurgeryConfig cfg;
  cfg.direction = d;
  cfg.pair_weight = p;
  cfg.triplet_weight = t;
  cfg.mask = m;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("surgery");

TEST_CASE("cosine directions substitute the partner axes") {
  const DirectionSet dirs = unit_directions(DirectionKind::cosine, kA, kP, kN);
  CHECK(dirs.e_p == Vec{-1.0, 0.0, 0.0});
  CHECK(dirs.e_n == Vec{1.0, 0.0, 0.0});
  CHECK(dirs.e_ap == Vec{0.0, -1.0, 0.0});
  CHECK(dirs.e_an == Vec{0.0, 0.0, 1.0});
}

TEST_CASE("cosine orthogonal direction removes the anchor-positive component") {
  const DirectionSet dirs = unit_directions(DirectionKind::cosine_orthogonal, kA, kP, kN);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(dirs.e_n[0] == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(dirs.e_n[1] == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(std::abs(dirs.e_n[2]) < 1e-15);
  CHECK(std::abs(dot(dirs.e_n, sub(kA.coords(), kP.coords()))) < 1e-12);
}

TEST_CASE("euclidean directions need distinct pairs") {
  CHECK_THROWS_AS(unit_directions(DirectionKind::euclidean, kA, kA, kN), DegenerateTriplet);
  CHECK_THROWS_AS(unit_directions(DirectionKind::euclidean_orthogonal, kA, kP, kA),
                  DegenerateTriplet);
}

TEST_CASE("collinear negative collapses to the zero vector under orthogonalization") {
  const Embedding antipode = normalize({-1.0, 0.0, 0.0});
  // e_n = f_a is parallel to f_a - f_p = 2 f_a here.
  const DirectionSet dirs = unit_directions(DirectionKind::cosine_orthogonal, kA, antipode, kN);
  CHECK(norm(dirs.e_n) == 0.0);
}

TEST_CASE("direction vectors are unit length for all kinds") {
  Rng rng(31);
  for (int i = 0; i < 250; ++i) {
    const Embedding a = random_unit(rng, 8);
    const Embedding p = random_unit(rng, 8);
    const Embedding n = random_unit(rng, 8);
    for (DirectionKind kind :
         {DirectionKind::euclidean, DirectionKind::cosine, DirectionKind::euclidean_orthogonal,
          DirectionKind::cosine_orthogonal}) {
      const DirectionSet dirs = unit_directions(kind, a, p, n);
      for (const Vec* v : {&dirs.e_p, &dirs.e_n, &dirs.e_ap, &dirs.e_an}) {
        const double len = norm(*v);
        if (len == 0.0) continue;  // degenerate collapse, allowed
        CHECK(std::abs(len - 1.0) < 1e-9);
      }
      if (kind == DirectionKind::euclidean_orthogonal ||
          kind == DirectionKind::cosine_orthogonal) {
        CHECK(std::abs(dot(dirs.e_n, sub(a.coords(), p.coords()))) < 1e-9);
        CHECK(std::abs(dot(dirs.e_an, sub(a.coords(), p.coords()))) < 1e-9);
      }
    }
  }
}

TEST_CASE("anchor orthogonalization can be toggled off") {
  Rng rng(32);
  const Embedding a = random_unit(rng, 5);
  const Embedding p = random_unit(rng, 5);
  const Embedding n = random_unit(rng, 5);
  const DirectionSet kept = unit_directions(DirectionKind::cosine_orthogonal, a, p, n, false);
  CHECK(kept.e_an == n.coords());
  const DirectionSet projected = unit_directions(DirectionKind::cosine_orthogonal, a, p, n, true);
  CHECK(std::abs(dot(projected.e_an, sub(a.coords(), p.coords()))) < 1e-9);
}

TEST_CASE("pair weight reference values") {
  SurgeryConfig cfg;
  const RelativeStats none_sig = empty_relative_stats(RelativeForm::sigmoid);
  const RelativeStats none_lin = empty_relative_stats(RelativeForm::linear);

  const PairWeights con = pair_weights(PairWeightKind::constant, {0.1, 0.9}, cfg, none_sig);
  CHECK(con.p_pos == 1.0);
  CHECK(con.p_neg == 1.0);

  const PairWeights euc = pair_weights(PairWeightKind::euclidean, {0.5, 0.5}, cfg, none_sig);
  CHECK(euc.p_pos == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(euc.p_neg == doctest::Approx(1.0).epsilon(1e-12));

  const PairWeights lin = pair_weights(PairWeightKind::linear, {0.8, 0.6}, cfg, none_lin);
  CHECK(lin.p_pos == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(lin.p_neg == 0.6);

  const PairWeights sig = pair_weights(PairWeightKind::sigmoid, {0.8, 0.3}, cfg, none_sig);
  CHECK(sig.p_pos == doctest::Approx(0.35434369377420455).epsilon(1e-12));
  CHECK(sig.p_neg == doctest::Approx(0.11920292202211756).epsilon(1e-12));

  RelativeStats rel_sig = none_sig;
  rel_sig.m_pos = 1.8221188003905089;
  const PairWeights sigms = pair_weights(PairWeightKind::sigmoid_ms, {0.8, 0.3}, cfg, rel_sig);
  CHECK(sigms.p_pos == doctest::Approx(0.27440581804701322).epsilon(1e-12));

  RelativeStats rel_lin = none_lin;
  rel_lin.m_pos = 0.3;
  rel_lin.m_neg = -0.05;
  const PairWeights linms = pair_weights(PairWeightKind::linear_ms, {0.8, 0.6}, cfg, rel_lin);
  CHECK(linms.p_pos == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(linms.p_neg == doctest::Approx(0.57).epsilon(1e-12));
}

TEST_CASE("pair weights are clamped at zero") {
  SurgeryConfig cfg;
  const PairWeights lin =
      pair_weights(PairWeightKind::linear, {0.5, -0.4}, cfg, empty_relative_stats(RelativeForm::linear));
  CHECK(lin.p_neg == 0.0);

  RelativeStats rel = empty_relative_stats(RelativeForm::linear);
  rel.m_pos = 1.5;  // inverted relative statistic would flip the sign
  const PairWeights linms = pair_weights(PairWeightKind::linear_ms, {0.2, 0.5}, cfg, rel);
  CHECK(linms.p_pos == 0.0);
}

TEST_CASE("ms weights reject stats of the wrong form") {
  SurgeryConfig cfg;
  CHECK_THROWS_AS(pair_weights(PairWeightKind::sigmoid_ms, {0.5, 0.5}, cfg,
                               empty_relative_stats(RelativeForm::linear)),
                  MismatchedStats);
  CHECK_THROWS_AS(pair_weights(PairWeightKind::linear_ms, {0.5, 0.5}, cfg,
                               empty_relative_stats(RelativeForm::sigmoid)),
                  MismatchedStats);
  // Self-similarity kinds ignore the stats entirely.
  CHECK_NOTHROW(pair_weights(PairWeightKind::sigmoid, {0.5, 0.5}, cfg,
                             empty_relative_stats(RelativeForm::linear)));
}

TEST_CASE("relative stats reference values and empty-set sentinels") {
  SurgeryConfig cfg;
  const RelativeStats sig_empty = relative_stats(RelativeForm::sigmoid, {0.8, 0.3}, {}, {}, cfg);
  CHECK(sig_empty.m_pos == 1.0);
  CHECK(sig_empty.m_neg == 1.0);

  const RelativeStats lin_empty = relative_stats(RelativeForm::linear, {0.8, 0.3}, {}, {}, cfg);
  CHECK(lin_empty.m_pos == 0.0);
  CHECK(lin_empty.m_neg == 0.0);

  const RelativeStats lin =
      relative_stats(RelativeForm::linear, {0.8, 0.6}, {0.5}, {0.65}, cfg);
  CHECK(lin.m_pos == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(lin.m_neg == doctest::Approx(-0.05).epsilon(1e-12));

  const RelativeStats sig = relative_stats(RelativeForm::sigmoid, {0.8, 0.3}, {0.5}, {}, cfg);
  CHECK(sig.m_pos == doctest::Approx(1.8221188003905089).epsilon(1e-12));
}

TEST_CASE("ms forms with empty sets reduce bitwise to the self-similarity forms") {
  SurgeryConfig cfg;
  Rng rng(33);
  for (int i = 0; i < 300; ++i) {
    const SimilarityPair sims{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    const PairWeights sig =
        pair_weights(PairWeightKind::sigmoid, sims, cfg, empty_relative_stats(RelativeForm::sigmoid));
    const PairWeights sigms = pair_weights(PairWeightKind::sigmoid_ms, sims, cfg,
                                           empty_relative_stats(RelativeForm::sigmoid));
    CHECK(sig.p_pos == sigms.p_pos);
    CHECK(sig.p_neg == sigms.p_neg);

    const PairWeights lin =
        pair_weights(PairWeightKind::linear, sims, cfg, empty_relative_stats(RelativeForm::linear));
    const PairWeights linms =
        pair_weights(PairWeightKind::linear_ms, sims, cfg, empty_relative_stats(RelativeForm::linear));
    CHECK(lin.p_pos == linms.p_pos);
    CHECK(lin.p_neg == linms.p_neg);
  }
}

TEST_CASE("triplet weight values and range") {
  CHECK(triplet_weight(TripletWeightKind::constant, {0.9, 0.1}, 2.0) == 0.5);
  CHECK(triplet_weight(TripletWeightKind::cosine, {0.4, 0.4}, 1.0) == 0.5);
  CHECK(triplet_weight(TripletWeightKind::cosine, {0.8, 0.3}, 1.0) ==
        doctest::Approx(0.37754066879814541).epsilon(1e-12));
  CHECK(triplet_weight(TripletWeightKind::circle, {0.8, 0.3}, 1.0) ==
        doctest::Approx(0.29525430200190895).epsilon(1e-12));

  Rng rng(34);
  for (int i = 0; i < 500; ++i) {
    const SimilarityPair sims{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    for (double tau : {1.0, 5.0, 32.0}) {
      const double wc = triplet_weight(TripletWeightKind::cosine, sims, tau);
      const double wr = triplet_weight(TripletWeightKind::circle, sims, tau);
      CHECK(wc > 0.0);
      CHECK(wc < 1.0);
      CHECK(wr > 0.0);
      CHECK(wr < 1.0);
    }
  }
}

TEST_CASE("positive mask boundaries") {
  CHECK(positive_mask(MaskKind::sc1, {0.3, 0.5}) == MaskAction::zero);
  CHECK(positive_mask(MaskKind::sc1, {0.5, 0.3}) == MaskAction::keep);
  CHECK(positive_mask(MaskKind::sc1, {0.4, 0.4}) == MaskAction::keep);
  // 0.3 * 1.7 - 0.01 lands on the boundary value 0.5, which is kept.
  CHECK(positive_mask(MaskKind::sc2, {0.3, 0.1}) == MaskAction::keep);
  CHECK(positive_mask(MaskKind::sc2, {0.9, 0.2}) == MaskAction::zero);
  CHECK(positive_mask(MaskKind::none, {0.0, 1.0}) == MaskAction::keep);
}

TEST_CASE("composed update on the orthogonal triplet") {
  const SurgeryConfig cfg =
      make_cfg(DirectionKind::cosine, PairWeightKind::constant, TripletWeightKind::constant);
  const TripletUpdate up = compose(cfg, kA, kP, kN);
  CHECK(up.g_p == Vec{-0.5, 0.0, 0.0});
  CHECK(up.g_n == Vec{0.5, 0.0, 0.0});
  CHECK(up.g_a == Vec{0.0, -0.5, 0.5});
}

TEST_CASE("euclidean composition equals a quarter of the loss gradient") {
  const SurgeryConfig cfg =
      make_cfg(DirectionKind::euclidean, PairWeightKind::euclidean, TripletWeightKind::constant);
  Rng rng(35);
  int checked = 0;
  while (checked < 50) {
    const Embedding a = random_unit(rng, 6);
    const Embedding p = random_unit(rng, 6);
    const Embedding n = random_unit(rng, 6);
    if (triplet_loss_euclidean(a.coords(), p.coords(), n.coords(), cfg.margin) <= 1e-3) continue;
    ++checked;
    const TripletUpdate up = compose(cfg, a, p, n);
    const LossParams params{cfg.margin, 1.0};
    for (auto [role, got] : {std::pair{TripletRole::positive, &up.g_p},
                             std::pair{TripletRole::negative, &up.g_n},
                             std::pair{TripletRole::anchor, &up.g_a}}) {
      const Vec fd = numeric_gradient(LossKind::euclidean, params, a.coords(), p.coords(),
                                      n.coords(), role, 1e-5);
      const Vec want = scaled(fd, 0.25);
      CHECK(norm(sub(*got, want)) / std::max(norm(want), 1e-12) < 1e-4);
    }
  }
}

TEST_CASE("sc1 mask zeroes the positive update exactly") {
  const SurgeryConfig open =
      make_cfg(DirectionKind::cosine, PairWeightKind::linear, TripletWeightKind::cosine);
  const SurgeryConfig masked =
      make_cfg(DirectionKind::cosine, PairWeightKind::linear, TripletWeightKind::cosine,
               MaskKind::sc1);
  Rng rng(36);
  int zeroed = 0;
  for (int i = 0; i < 200; ++i) {
    const Embedding a = random_unit(rng, 4);
    const Embedding p = random_unit(rng, 4);
    const Embedding n = random_unit(rng, 4);
    const TripletUpdate um = compose(masked, a, p, n);
    const TripletUpdate uo = compose(open, a, p, n);
    CHECK(um.g_n == uo.g_n);
    if (cosine_similarity(a, n) > cosine_similarity(a, p)) {
      ++zeroed;
      for (double x : um.g_p) CHECK(x == 0.0);
    } else {
      CHECK(um.g_p == uo.g_p);
    }
  }
  CHECK(zeroed > 0);  // the sample must actually exercise the mask
}

TEST_CASE("best combination preset") {
  const SurgeryConfig cfg = best_combination_preset();
  CHECK(cfg.direction == DirectionKind::cosine_orthogonal);
  CHECK(cfg.pair_weight == PairWeightKind::linear_ms);
  CHECK(cfg.triplet_weight == TripletWeightKind::circle);
  CHECK(cfg.mask == MaskKind::none);
  CHECK(cfg.alpha == 2.0);
  CHECK(cfg.beta == 10.0);
  CHECK(cfg.lambda == 0.5);
  CHECK(cfg.tau == 1.0);
}

TEST_CASE("kind names round-trip") {
  for (DirectionKind k : {DirectionKind::euclidean, DirectionKind::cosine,
                          DirectionKind::euclidean_orthogonal, DirectionKind::cosine_orthogonal}) {
    CHECK(parse_direction_kind(to_string(k)) == k);
  }
  for (PairWeightKind k :
       {PairWeightKind::constant, PairWeightKind::euclidean, PairWeightKind::linear,
        PairWeightKind::sigmoid, PairWeightKind::sigmoid_ms, PairWeightKind::linear_ms}) {
    CHECK(parse_pair_weight_kind(to_string(k)) == k);
  }
  CHECK(!parse_direction_kind("diagonal").has_value());
  CHECK(!parse_mask_kind("sc3").has_value());
}

TEST_SUITE_END();
