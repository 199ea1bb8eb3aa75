#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradsurg/geometry.hpp"

namespace gradsurg {

// Unit update directions: along the pair displacement (euclidean family) or
// along the partner feature's axis (cosine family). The *_orthogonal variants
// additionally constrain the negative-pair motion to be orthogonal to the
// anchor-positive displacement, so the two motions cannot cancel.
enum class DirectionKind { euclidean, cosine, euclidean_orthogonal, cosine_orthogonal };

// Per-pair scalar weights. The *_ms variants modulate the self-similarity
// weight with relative statistics gathered from the rest of the batch.
enum class PairWeightKind { constant, euclidean, linear, sigmoid, sigmoid_ms, linear_ms };

// Whole-triplet scalar weight, a function of both pair similarities.
enum class TripletWeightKind { constant, cosine, circle };

// Selective masks that zero the positive-pair weight for triplets whose
// negative is too close: sc1 uses a linear boundary, sc2 a circular one.
enum class MaskKind { none, sc1, sc2 };

const char* to_string(DirectionKind k);
const char* to_string(PairWeightKind k);
const char* to_string(TripletWeightKind k);
const char* to_string(MaskKind k);

std::optional<DirectionKind> parse_direction_kind(std::string_view s);
std::optional<PairWeightKind> parse_pair_weight_kind(std::string_view s);
std::optional<TripletWeightKind> parse_triplet_weight_kind(std::string_view s);
std::optional<MaskKind> parse_mask_kind(std::string_view s);

// Full recipe for one composed gradient update.
struct SurgeryConfig {
  DirectionKind direction = DirectionKind::cosine;
  PairWeightKind pair_weight = PairWeightKind::constant;
  TripletWeightKind triplet_weight = TripletWeightKind::constant;
  MaskKind mask = MaskKind::none;
  double tau = 1.0;     // exponent scale in the cosine/circle triplet weights
  double alpha = 2.0;   // positive-pair sigmoid steepness
  double beta = 10.0;   // negative-pair sigmoid steepness
  double lambda = 0.5;  // sigmoid center
  double margin = 0.2;  // hinge margin of the euclidean reference loss
};

// Unit motion directions for the four triplet roles: the positive example
// (e_p), the negative example (e_n), and the anchor's positive-pair and
// negative-pair components (e_ap, e_an).
struct DirectionSet {
  Vec e_p;
  Vec e_n;
  Vec e_ap;
  Vec e_an;
};

struct PairWeights {
  double p_pos = 0.0;
  double p_neg = 0.0;
};

enum class RelativeForm { sigmoid, linear };

// Batch-relative similarity statistics feeding the *_ms pair weights.
// Sentinels (1 for sigmoid, 0 for linear) make the ms weights collapse to
// their self-similarity counterparts when the relative sets are empty.
struct RelativeStats {
  double m_pos = 1.0;
  double m_neg = 1.0;
  RelativeForm form = RelativeForm::sigmoid;
};

RelativeStats empty_relative_stats(RelativeForm form);

// The relative form a pair-weight kind consumes; empty for self-similarity
// kinds, which ignore the stats entirely.
std::optional<RelativeForm> relative_form_for(PairWeightKind kind);

// Composed per-triplet gradient. The optimizer moves each feature opposite
// its entry. Zero vectors are legal (masked or degenerate components).
struct TripletUpdate {
  Vec g_a;
  Vec g_p;
  Vec g_n;
};

enum class MaskAction { keep, zero };

// The orthogonalize_anchor flag controls whether the anchor's negative-pair
// component e_an is orthogonalized along with e_n in the *_orthogonal kinds.
DirectionSet unit_directions(DirectionKind kind, const Embedding& f_a, const Embedding& f_p,
                             const Embedding& f_n, bool orthogonalize_anchor = true);

RelativeStats relative_stats(RelativeForm form, SimilarityPair sims,
                             const std::vector<double>& set_p, const std::vector<double>& set_n,
                             const SurgeryConfig& cfg);

PairWeights pair_weights(PairWeightKind kind, SimilarityPair sims, const SurgeryConfig& cfg,
                         const RelativeStats& rel);

double triplet_weight(TripletWeightKind kind, SimilarityPair sims, double tau);

MaskAction positive_mask(MaskKind kind, SimilarityPair sims);

TripletUpdate compose(const SurgeryConfig& cfg, const Embedding& f_a, const Embedding& f_p,
                      const Embedding& f_n, const RelativeStats& rel);

// Convenience overload with the empty stats matching cfg.pair_weight.
TripletUpdate compose(const SurgeryConfig& cfg, const Embedding& f_a, const Embedding& f_p,
                      const Embedding& f_n);

// The combination that performed best overall: cosine-orthogonal direction,
// linear ms pair weight, circle triplet weight, no mask.
SurgeryConfig best_combination_preset();

}  // namespace gradsurg
