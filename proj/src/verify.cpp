#include "gradsurg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gradsurg/evaluation.hpp"
#include "gradsurg/losses.hpp"
#include "gradsurg/mining.hpp"
#include "gradsurg/rng.hpp"

namespace gradsurg {

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kFdBound = 1e-4;

struct UnitTriplet {
  Embedding a;
  Embedding p;
  Embedding n;
};

UnitTriplet random_triplet(Rng& rng, std::size_t dim) {
  return {random_unit(rng, dim), random_unit(rng, dim), random_unit(rng, dim)};
}

// Resamples until the hinge is active with clearance, so the central
// difference never straddles the kink.
UnitTriplet random_active_triplet(Rng& rng, std::size_t dim, double margin) {
  while (true) {
    UnitTriplet t = random_triplet(rng, dim);
    const double gap = triplet_loss_euclidean(t.a.coords(), t.p.coords(), t.n.coords(), margin);
    if (gap > 1e-3) return t;
  }
}

double relative_error(const Vec& got, const Vec& want) {
  const Vec diff = sub(got, want);
  return norm(diff) / std::max(norm(want), 1e-12);
}

const Vec& role_of(const TripletUpdate& up, TripletRole role) {
  switch (role) {
    case TripletRole::anchor: return up.g_a;
    case TripletRole::positive: return up.g_p;
    default: return up.g_n;
  }
}

double frozen_max_error(std::initializer_list<std::pair<double, double>> pairs) {
  double worst = 0.0;
  for (const auto& [got, want] : pairs) worst = std::max(worst, std::abs(got - want));
  return worst;
}

}  // namespace

SuiteResult verify_euclidean_gradient(std::uint64_t seed) {
  SuiteResult res{"euclidean-gradient-oracle", false, 0.0, kFdBound, ""};
  Rng rng(mix_seed(seed, 1));

  SurgeryConfig cfg;
  cfg.direction = DirectionKind::euclidean;
  cfg.pair_weight = PairWeightKind::euclidean;
  cfg.triplet_weight = TripletWeightKind::constant;
  const LossParams params{cfg.margin, 1.0};

  int count = 0;
  for (std::size_t dim : {3u, 16u, 64u}) {
    for (int i = 0; i < 350; ++i) {
      const UnitTriplet t = random_active_triplet(rng, dim, cfg.margin);
      const TripletUpdate up = compose(cfg, t.a, t.p, t.n);
      for (TripletRole role : {TripletRole::anchor, TripletRole::positive, TripletRole::negative}) {
        const Vec fd = numeric_gradient(LossKind::euclidean, params, t.a.coords(), t.p.coords(),
                                        t.n.coords(), role, kFdStep);
        res.max_error = std::max(res.max_error, relative_error(role_of(up, role), scaled(fd, 0.25)));
      }
      ++count;
    }
  }
  res.passed = res.max_error < res.bound;
  res.detail = std::to_string(count) + " active triplets, d in {3,16,64}, all roles";
  return res;
}

SuiteResult verify_cosine_gradient(std::uint64_t seed) {
  SuiteResult res{"cosine-gradient-oracle", false, 0.0, kFdBound, ""};
  Rng rng(mix_seed(seed, 2));

  int count = 0;
  for (double tau : {1.0, 5.0}) {
    SurgeryConfig cfg;
    cfg.direction = DirectionKind::cosine;
    cfg.pair_weight = PairWeightKind::constant;
    cfg.triplet_weight = TripletWeightKind::cosine;
    cfg.tau = tau;
    const LossParams params{0.0, tau};

    for (std::size_t dim : {3u, 16u, 64u}) {
      for (int i = 0; i < 350; ++i) {
        const UnitTriplet t = random_triplet(rng, dim);
        const TripletUpdate up = compose(cfg, t.a, t.p, t.n);
        for (TripletRole role :
             {TripletRole::anchor, TripletRole::positive, TripletRole::negative}) {
          const Vec fd = numeric_gradient(LossKind::cosine, params, t.a.coords(), t.p.coords(),
                                          t.n.coords(), role, kFdStep);
          res.max_error =
              std::max(res.max_error, relative_error(role_of(up, role), scaled(fd, 1.0 / tau)));
        }
        ++count;
      }
    }
  }
  res.passed = res.max_error < res.bound;
  res.detail = std::to_string(count) + " triplets, tau in {1,5}, all roles";
  return res;
}

SuiteResult verify_orthogonality(std::uint64_t seed) {
  SuiteResult res{"orthogonal-direction", false, 0.0, 1e-9, ""};
  Rng rng(mix_seed(seed, 3));

  int count = 0;
  for (DirectionKind kind :
       {DirectionKind::euclidean_orthogonal, DirectionKind::cosine_orthogonal}) {
    for (std::size_t dim : {3u, 8u, 32u}) {
      for (int i = 0; i < 340; ++i) {
        const UnitTriplet t = random_triplet(rng, dim);
        const DirectionSet dirs = unit_directions(kind, t.a, t.p, t.n);
        const Vec axis = sub(t.a.coords(), t.p.coords());
        const double n_en = norm(dirs.e_n);
        if (n_en == 0.0) continue;  // documented degenerate collapse
        res.max_error = std::max(res.max_error, std::abs(dot(dirs.e_n, axis)));
        res.max_error = std::max(res.max_error, std::abs(n_en - 1.0));
        res.max_error = std::max(res.max_error, std::abs(norm(dirs.e_p) - 1.0));
        ++count;
      }
    }
  }
  res.passed = res.max_error < res.bound;
  res.detail = std::to_string(count) + " triplets, both orthogonal kinds";
  return res;
}

SuiteResult verify_projection_lengths() {
  SuiteResult res{"projection-identity", false, 0.0, 1e-9, ""};

  const int points = 4001;
  const double lo = -1.0 + 1e-9;
  const double hi = 1.0 - 1e-6;
  for (int i = 0; i < points; ++i) {
    const double s = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    for (Metric metric : {Metric::euclidean, Metric::cosine}) {
      for (PairRole role : {PairRole::positive, PairRole::negative}) {
        const double l = parallel_length(metric, role, s);
        const double e = effective_strength(metric, s);
        res.max_error = std::max(res.max_error, std::abs(l * l + e * e - 1.0));
      }
    }
  }

  // The two strengths cross where their difference changes sign; bisection
  // should land on 0.5.
  const auto diff = [](double s) {
    return effective_strength(Metric::euclidean, s) - effective_strength(Metric::cosine, s);
  };
  double lo_s = 0.1;
  double hi_s = 0.9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo_s + hi_s);
    if (diff(mid) < 0.0) {
      lo_s = mid;
    } else {
      hi_s = mid;
    }
  }
  const double crossing = 0.5 * (lo_s + hi_s);
  res.max_error = std::max(res.max_error, std::abs(crossing - 0.5));
  res.max_error = std::max(res.max_error, std::abs(diff(0.5)));

  res.passed = res.max_error < res.bound;
  std::ostringstream d;
  d << points << " grid points, crossing at " << crossing;
  res.detail = d.str();
  return res;
}

SuiteResult verify_pair_weights() {
  SuiteResult res{"pair-weight-values", false, 0.0, 1e-9, ""};
  SurgeryConfig cfg;  // alpha=2, beta=10, lambda=0.5

  const RelativeStats none_sig = empty_relative_stats(RelativeForm::sigmoid);
  const RelativeStats none_lin = empty_relative_stats(RelativeForm::linear);

  const PairWeights w_con =
      pair_weights(PairWeightKind::constant, SimilarityPair{0.37, -0.2}, cfg, none_sig);
  const PairWeights w_euc =
      pair_weights(PairWeightKind::euclidean, SimilarityPair{0.5, 0.5}, cfg, none_sig);
  const PairWeights w_lin =
      pair_weights(PairWeightKind::linear, SimilarityPair{0.8, 0.6}, cfg, none_lin);
  const PairWeights w_sig =
      pair_weights(PairWeightKind::sigmoid, SimilarityPair{0.8, 0.3}, cfg, none_sig);

  const RelativeStats rel_sig =
      relative_stats(RelativeForm::sigmoid, SimilarityPair{0.8, 0.3}, {0.5}, {}, cfg);
  const PairWeights w_sigms =
      pair_weights(PairWeightKind::sigmoid_ms, SimilarityPair{0.8, 0.3}, cfg, rel_sig);

  const RelativeStats rel_lin =
      relative_stats(RelativeForm::linear, SimilarityPair{0.8, 0.6}, {0.5}, {0.65}, cfg);
  const PairWeights w_linms =
      pair_weights(PairWeightKind::linear_ms, SimilarityPair{0.8, 0.6}, cfg, rel_lin);

  res.max_error = frozen_max_error({
      {w_con.p_pos, 1.0},
      {w_con.p_neg, 1.0},
      {w_euc.p_pos, 1.0},
      {w_euc.p_neg, 1.0},
      {w_lin.p_pos, 0.2},
      {w_lin.p_neg, 0.6},
      {w_sig.p_pos, 0.35434369377420455},   // 1/(1+e^0.6)
      {w_sig.p_neg, 0.11920292202211756},   // 1/(1+e^2)
      {rel_sig.m_pos, 1.8221188003905089},  // e^0.6
      {w_sigms.p_pos, 0.27440581804701322}, // 1/(2 e^0.6)
      {rel_lin.m_pos, 0.3},
      {rel_lin.m_neg, -0.05},
      {w_linms.p_pos, 0.14},
      {w_linms.p_neg, 0.57},
  });

  // Maximum-penalty form of the ms negative weight at s_an = 1: with
  // beta = 10 and lambda = 0.5 the self term is exactly e^-5.
  for (double m : {0.25, 0.5, 1.0, 2.0, 7.5}) {
    RelativeStats rel = none_sig;
    rel.m_neg = m;
    const PairWeights w = pair_weights(PairWeightKind::sigmoid_ms, SimilarityPair{0.0, 1.0}, cfg, rel);
    const double want = 1.0 / (m + std::exp(-5.0));
    if (std::abs(w.p_neg - want) > 1e-12) {
      res.detail = "ms maximum-penalty identity violated";
      return res;
    }
  }

  // Monotonicity over a similarity grid.
  double prev_lin_pos = 2.0;
  double prev_sig_pos = 2.0;
  double prev_lin_neg = -1.0;
  double prev_sig_neg = -1.0;
  double prev_ms_neg = 1e300;
  for (int i = 0; i <= 100; ++i) {
    const double s = static_cast<double>(i) / 100.0;
    const PairWeights lin = pair_weights(PairWeightKind::linear, {s, s}, cfg, none_lin);
    const PairWeights sig = pair_weights(PairWeightKind::sigmoid, {s, s}, cfg, none_sig);
    if (lin.p_pos >= prev_lin_pos || sig.p_pos >= prev_sig_pos || lin.p_neg < prev_lin_neg ||
        sig.p_neg <= prev_sig_neg) {
      res.detail = "pair-weight monotonicity violated at s=" + std::to_string(s);
      return res;
    }
    prev_lin_pos = lin.p_pos;
    prev_sig_pos = sig.p_pos;
    prev_lin_neg = lin.p_neg;
    prev_sig_neg = sig.p_neg;

    RelativeStats rel = none_sig;
    rel.m_neg = 0.1 + 3.0 * s;  // increasing stat must decrease the weight
    const PairWeights ms = pair_weights(PairWeightKind::sigmoid_ms, {0.5, 0.6}, cfg, rel);
    if (ms.p_neg >= prev_ms_neg) {
      res.detail = "ms negative weight not decreasing in its relative stat";
      return res;
    }
    prev_ms_neg = ms.p_neg;
  }

  res.passed = res.max_error < res.bound;
  res.detail = "frozen values, maximum-penalty identity, monotonicity grid";
  return res;
}

SuiteResult verify_triplet_weights(const TripletWeightFn& candidate) {
  SuiteResult res{"triplet-weight-values", false, 0.0, 1e-9, ""};
  const TripletWeightFn fn = candidate ? candidate : TripletWeightFn(&triplet_weight);

  res.max_error = frozen_max_error({
      {fn(TripletWeightKind::constant, {0.9, -0.3}, 3.0), 0.5},
      {fn(TripletWeightKind::cosine, {0.8, 0.3}, 1.0), 0.37754066879814541},  // 1/(1+e^0.5)
      {fn(TripletWeightKind::circle, {0.8, 0.3}, 1.0), 0.29525430200190895},  // 1/(1+e^0.87)
      {fn(TripletWeightKind::cosine, {0.42, 0.42}, 1.0), 0.5},
      {fn(TripletWeightKind::cosine, {0.42, 0.42}, 7.0), 0.5},
  });

  Rng rng(99);
  for (int i = 0; i < 2000 && res.max_error < res.bound; ++i) {
    const SimilarityPair sims{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    for (double tau : {1.0, 5.0, 32.0}) {
      for (TripletWeightKind kind : {TripletWeightKind::cosine, TripletWeightKind::circle}) {
        const double t = fn(kind, sims, tau);
        if (!(t > 0.0 && t < 1.0)) {
          res.detail = "weight out of (0,1)";
          return res;
        }
      }
    }
    if (fn(TripletWeightKind::constant, sims, 1.0) != 0.5) {
      res.detail = "constant weight not exactly 0.5";
      return res;
    }
  }

  // Harder positives (smaller s_ap) must never get less weight.
  for (int i = 0; i < 99; ++i) {
    const double s1 = static_cast<double>(i) / 100.0;
    const double s2 = s1 + 0.01;
    if (fn(TripletWeightKind::cosine, {s1, 0.4}, 2.0) <=
        fn(TripletWeightKind::cosine, {s2, 0.4}, 2.0)) {
      res.detail = "cosine weight not decreasing in s_ap";
      return res;
    }
  }

  res.passed = res.max_error < res.bound;
  res.detail = "frozen values, range, monotonicity";
  return res;
}

SuiteResult verify_reductions(std::uint64_t seed) {
  SuiteResult res{"ms-reduction-and-mask", false, 0.0, 0.5, ""};
  Rng rng(mix_seed(seed, 4));
  SurgeryConfig cfg;

  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const SimilarityPair sims{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    const PairWeights sig =
        pair_weights(PairWeightKind::sigmoid, sims, cfg, empty_relative_stats(RelativeForm::sigmoid));
    const PairWeights sigms = pair_weights(PairWeightKind::sigmoid_ms, sims, cfg,
                                           empty_relative_stats(RelativeForm::sigmoid));
    const PairWeights lin =
        pair_weights(PairWeightKind::linear, sims, cfg, empty_relative_stats(RelativeForm::linear));
    const PairWeights linms = pair_weights(PairWeightKind::linear_ms, sims, cfg,
                                           empty_relative_stats(RelativeForm::linear));
    // Bitwise, not approximate: the ms forms with empty sets must be the
    // self-similarity forms.
    if (sig.p_pos != sigms.p_pos || sig.p_neg != sigms.p_neg) ++mismatches;
    if (lin.p_pos != linms.p_pos || lin.p_neg != linms.p_neg) ++mismatches;
  }

  for (int i = 0; i < 300; ++i) {
    const UnitTriplet t = random_triplet(rng, 6);
    for (MaskKind mask : {MaskKind::sc1, MaskKind::sc2}) {
      SurgeryConfig masked = cfg;
      masked.mask = mask;
      SurgeryConfig open = cfg;
      open.mask = MaskKind::none;
      const TripletUpdate with_mask = compose(masked, t.a, t.p, t.n);
      const TripletUpdate without = compose(open, t.a, t.p, t.n);
      const SimilarityPair sims{cosine_similarity(t.a, t.p), cosine_similarity(t.a, t.n)};
      const bool should_zero = positive_mask(mask, sims) == MaskAction::zero;
      for (std::size_t k = 0; k < with_mask.g_n.size(); ++k) {
        if (with_mask.g_n[k] != without.g_n[k]) ++mismatches;
        if (should_zero) {
          if (with_mask.g_p[k] != 0.0) ++mismatches;
        } else if (with_mask.g_p[k] != without.g_p[k]) {
          ++mismatches;
        }
      }
    }
  }

  res.max_error = static_cast<double>(mismatches);
  res.passed = mismatches == 0;
  res.detail = "1000 reduction pairs, 600 masked composes, bitwise";
  return res;
}

SuiteResult verify_small_instance_oracles(std::uint64_t seed) {
  SuiteResult res{"small-instance-oracles", false, 0.0, 0.5, ""};
  Rng rng(mix_seed(seed, 5));

  int mismatches = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 4 + rng.index(7);  // 4..10 samples
    const std::size_t dim = 2 + rng.index(7);
    const int classes = n < 6 ? 2 : 2 + static_cast<int>(rng.index(2));

    // Two guaranteed members per class, remainder random, then shuffled.
    std::vector<int> labels;
    for (int c = 0; c < classes; ++c) {
      labels.push_back(c);
      labels.push_back(c);
    }
    while (labels.size() < n) {
      labels.push_back(static_cast<int>(rng.index(static_cast<std::size_t>(classes))));
    }
    rng.shuffle(labels);

    std::vector<Embedding> embs;
    for (std::size_t i = 0; i < n; ++i) embs.push_back(random_unit(rng, dim));

    // Exhaustive easy-positive hard-negative selection.
    const std::vector<TripletIndices> got = ephn_triplets(embs, labels);
    for (std::size_t a = 0; a < n; ++a) {
      int best_p = -1;
      int best_n = -1;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == a) continue;
        const double s = cosine_similarity(embs[a], embs[j]);
        if (labels[j] == labels[a]) {
          if (best_p < 0 || s > cosine_similarity(embs[a], embs[static_cast<std::size_t>(best_p)]))
            best_p = static_cast<int>(j);
        } else {
          if (best_n < 0 || s > cosine_similarity(embs[a], embs[static_cast<std::size_t>(best_n)]))
            best_n = static_cast<int>(j);
        }
      }
      if (got[a].positive != best_p || got[a].negative != best_n) ++mismatches;
    }

    // Exhaustive recall: pick the k nearest by repeated scans.
    std::vector<int> ks;
    for (std::size_t k = 1; k < n; ++k) ks.push_back(static_cast<int>(k));
    const RecallReport report = recall_at_k(embs, labels, ks);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      const int k = ks[ki];
      int hits = 0;
      for (std::size_t q = 0; q < n; ++q) {
        std::vector<bool> chosen(n, false);
        chosen[q] = true;
        bool found = false;
        for (int pick = 0; pick < k; ++pick) {
          int best = -1;
          for (std::size_t j = 0; j < n; ++j) {
            if (chosen[j]) continue;
            if (best < 0) {
              best = static_cast<int>(j);
              continue;
            }
            const double sj = cosine_similarity(embs[q], embs[j]);
            const double sb = cosine_similarity(embs[q], embs[static_cast<std::size_t>(best)]);
            if (sj > sb || (sj == sb && static_cast<int>(j) < best)) best = static_cast<int>(j);
          }
          chosen[static_cast<std::size_t>(best)] = true;
          if (labels[static_cast<std::size_t>(best)] == labels[q]) {
            found = true;
            break;
          }
        }
        hits += found ? 1 : 0;
      }
      const double want = static_cast<double>(hits) / static_cast<double>(n);
      if (report.recall[ki] != want) ++mismatches;
    }
  }

  res.max_error = static_cast<double>(mismatches);
  res.passed = mismatches == 0;
  res.detail = "100 random instances of <= 10 samples, exact match";
  return res;
}

std::vector<SuiteResult> run_verification(std::uint64_t seed) {
  return {
      verify_euclidean_gradient(seed), verify_cosine_gradient(seed),
      verify_orthogonality(seed),      verify_projection_lengths(),
      verify_pair_weights(),           verify_triplet_weights(),
      verify_reductions(seed),         verify_small_instance_oracles(seed),
  };
}

void print_report(const std::vector<SuiteResult>& results, std::ostream& out) {
  for (const auto& r : results) {
    std::ostringstream line;
    line << "suite " << r.name;
    for (std::size_t i = line.str().size(); i < 36; ++i) line << ' ';
    line << (r.passed ? "PASS" : "FAIL") << "  max_err=" << r.max_error << " (bound " << r.bound
         << ")  " << r.detail;
    out << line.str() << "\n";
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  out << "verify: " << passed << "/" << results.size() << " suites passed\n";
}

bool all_passed(const std::vector<SuiteResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace gradsurg
