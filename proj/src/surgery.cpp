#include "gradsurg/surgery.hpp"

#include <cmath>

namespace gradsurg {

namespace {

// Exponent clamped so large steepness values cannot blow up mid-training.
// The bound also keeps 1 + exp(x) strictly away from 1 in double precision,
// so sigmoid-family weights stay inside the open interval (0, 1).
double guarded_exp(double x) {
  if (x > 36.0) x = 36.0;
  if (x < -36.0) x = -36.0;
  return std::exp(x);
}

double sig_pos_weight(double s_ap, double m, double alpha, double lambda) {
  return 1.0 / (m + guarded_exp(alpha * (s_ap - lambda)));
}

double sig_neg_weight(double s_an, double m, double beta, double lambda) {
  return 1.0 / (m + guarded_exp(-beta * (s_an - lambda)));
}

double lin_pos_weight(double s_ap, double m) { return std::max(0.0, (1.0 - m) * (1.0 - s_ap)); }

double lin_neg_weight(double s_an, double m) { return std::max(0.0, (1.0 + m) * s_an); }

// Component of v orthogonal to axis, renormalized. A near-parallel v
// collapses to the zero vector (the only length-compatible choice); a
// near-zero axis leaves v untouched since the constraint is already met.
Vec orthogonalized(const Vec& v, const Vec& axis) {
  const double axis_sq = dot(axis, axis);
  if (axis_sq < 1e-24) return v;
  Vec residual = v;
  axpy(-dot(v, axis) / axis_sq, axis, residual);
  const double r = norm(residual);
  if (r < 1e-12) return Vec(v.size(), 0.0);
  return scaled(residual, 1.0 / r);
}

double mean_of(const std::vector<double>& xs, double (*term)(double, double, double), double s,
               double scale) {
  double acc = 0.0;
  for (double r : xs) acc += term(s, r, scale);
  return acc / static_cast<double>(xs.size());
}

double sig_pos_term(double s_ap, double r, double alpha) {
  return guarded_exp(alpha * (s_ap - r));
}
double sig_neg_term(double s_an, double r, double beta) {
  return guarded_exp(-beta * (s_an - r));
}
double lin_term(double s, double r, double) { return s - r; }

}  // namespace

const char* to_string(DirectionKind k) {
  switch (k) {
    case DirectionKind::euclidean: return "euclidean";
    case DirectionKind::cosine: return "cosine";
    case DirectionKind::euclidean_orthogonal: return "euclidean_orthogonal";
    case DirectionKind::cosine_orthogonal: return "cosine_orthogonal";
  }
  return "?";
}

const char* to_string(PairWeightKind k) {
  switch (k) {
    case PairWeightKind::constant: return "constant";
    case PairWeightKind::euclidean: return "euclidean";
    case PairWeightKind::linear: return "linear";
    case PairWeightKind::sigmoid: return "sigmoid";
    case PairWeightKind::sigmoid_ms: return "sigmoid_ms";
    case PairWeightKind::linear_ms: return "linear_ms";
  }
  return "?";
}

const char* to_string(TripletWeightKind k) {
  switch (k) {
    case TripletWeightKind::constant: return "constant";
    case TripletWeightKind::cosine: return "cosine";
    case TripletWeightKind::circle: return "circle";
  }
  return "?";
}

const char* to_string(MaskKind k) {
  switch (k) {
    case MaskKind::none: return "none";
    case MaskKind::sc1: return "sc1";
    case MaskKind::sc2: return "sc2";
  }
  return "?";
}

std::optional<DirectionKind> parse_direction_kind(std::string_view s) {
  if (s == "euclidean") return DirectionKind::euclidean;
  if (s == "cosine") return DirectionKind::cosine;
  if (s == "euclidean_orthogonal") return DirectionKind::euclidean_orthogonal;
  if (s == "cosine_orthogonal") return DirectionKind::cosine_orthogonal;
  return std::nullopt;
}

std::optional<PairWeightKind> parse_pair_weight_kind(std::string_view s) {
  if (s == "constant") return PairWeightKind::constant;
  if (s == "euclidean") return PairWeightKind::euclidean;
  if (s == "linear") return PairWeightKind::linear;
  if (s == "sigmoid") return PairWeightKind::sigmoid;
  if (s == "sigmoid_ms") return PairWeightKind::sigmoid_ms;
  if (s == "linear_ms") return PairWeightKind::linear_ms;
  return std::nullopt;
}

std::optional<TripletWeightKind> parse_triplet_weight_kind(std::string_view s) {
  if (s == "constant") return TripletWeightKind::constant;
  if (s == "cosine") return TripletWeightKind::cosine;
  if (s == "circle") return TripletWeightKind::circle;
  return std::nullopt;
}

std::optional<MaskKind> parse_mask_kind(std::string_view s) {
  if (s == "none") return MaskKind::none;
  if (s == "sc1") return MaskKind::sc1;
  if (s == "sc2") return MaskKind::sc2;
  return std::nullopt;
}

RelativeStats empty_relative_stats(RelativeForm form) {
  RelativeStats out;
  out.form = form;
  out.m_pos = form == RelativeForm::sigmoid ? 1.0 : 0.0;
  out.m_neg = out.m_pos;
  return out;
}

std::optional<RelativeForm> relative_form_for(PairWeightKind kind) {
  if (kind == PairWeightKind::sigmoid_ms) return RelativeForm::sigmoid;
  if (kind == PairWeightKind::linear_ms) return RelativeForm::linear;
  return std::nullopt;
}

DirectionSet unit_directions(DirectionKind kind, const Embedding& f_a, const Embedding& f_p,
                             const Embedding& f_n, bool orthogonalize_anchor) {
  const double s_ap = cosine_similarity(f_a, f_p);
  const double s_an = cosine_similarity(f_a, f_n);

  DirectionSet out;
  const bool euclidean_base =
      kind == DirectionKind::euclidean || kind == DirectionKind::euclidean_orthogonal;

  if (euclidean_base) {
    if (s_ap >= 1.0 - 1e-12 || s_an >= 1.0 - 1e-12) {
      throw DegenerateTriplet("coincident pair: s_ap=" + std::to_string(s_ap) +
                              " s_an=" + std::to_string(s_an));
    }
    const Vec disp_p = sub(f_p.coords(), f_a.coords());
    const Vec disp_n = sub(f_a.coords(), f_n.coords());
    const double len_p = norm(disp_p);
    const double len_n = norm(disp_n);
    if (len_p < 1e-12 || len_n < 1e-12) {
      throw DegenerateTriplet("displacement too short to normalize");
    }
    out.e_p = scaled(disp_p, 1.0 / len_p);
    out.e_n = scaled(disp_n, 1.0 / len_n);
    out.e_ap = scaled(out.e_p, -1.0);
    out.e_an = scaled(out.e_n, -1.0);
  } else {
    out.e_p = scaled(f_a.coords(), -1.0);
    out.e_n = f_a.coords();
    out.e_ap = scaled(f_p.coords(), -1.0);
    out.e_an = f_n.coords();
  }

  if (kind == DirectionKind::euclidean_orthogonal || kind == DirectionKind::cosine_orthogonal) {
    const Vec axis = sub(f_a.coords(), f_p.coords());
    out.e_n = orthogonalized(out.e_n, axis);
    if (orthogonalize_anchor) out.e_an = orthogonalized(out.e_an, axis);
  }
  return out;
}

RelativeStats relative_stats(RelativeForm form, SimilarityPair sims,
                             const std::vector<double>& set_p, const std::vector<double>& set_n,
                             const SurgeryConfig& cfg) {
  RelativeStats out;
  out.form = form;
  if (form == RelativeForm::sigmoid) {
    out.m_pos = set_p.empty() ? 1.0 : mean_of(set_p, sig_pos_term, sims.s_ap, cfg.alpha);
    out.m_neg = set_n.empty() ? 1.0 : mean_of(set_n, sig_neg_term, sims.s_an, cfg.beta);
  } else {
    out.m_pos = set_p.empty() ? 0.0 : mean_of(set_p, lin_term, sims.s_ap, 0.0);
    out.m_neg = set_n.empty() ? 0.0 : mean_of(set_n, lin_term, sims.s_an, 0.0);
  }
  return out;
}

PairWeights pair_weights(PairWeightKind kind, SimilarityPair sims, const SurgeryConfig& cfg,
                         const RelativeStats& rel) {
  const auto needed = relative_form_for(kind);
  if (needed && rel.form != *needed) {
    throw MismatchedStats(std::string("pair weight ") + to_string(kind) +
                          " needs relative stats of the other form");
  }

  PairWeights out;
  switch (kind) {
    case PairWeightKind::constant:
      out.p_pos = 1.0;
      out.p_neg = 1.0;
      break;
    case PairWeightKind::euclidean:
      out.p_pos = std::sqrt(std::max(0.0, 2.0 - 2.0 * sims.s_ap));
      out.p_neg = std::sqrt(std::max(0.0, 2.0 - 2.0 * sims.s_an));
      break;
    case PairWeightKind::linear:
      out.p_pos = lin_pos_weight(sims.s_ap, 0.0);
      out.p_neg = lin_neg_weight(sims.s_an, 0.0);
      break;
    case PairWeightKind::sigmoid:
      out.p_pos = sig_pos_weight(sims.s_ap, 1.0, cfg.alpha, cfg.lambda);
      out.p_neg = sig_neg_weight(sims.s_an, 1.0, cfg.beta, cfg.lambda);
      break;
    case PairWeightKind::sigmoid_ms:
      out.p_pos = sig_pos_weight(sims.s_ap, rel.m_pos, cfg.alpha, cfg.lambda);
      out.p_neg = sig_neg_weight(sims.s_an, rel.m_neg, cfg.beta, cfg.lambda);
      break;
    case PairWeightKind::linear_ms:
      out.p_pos = lin_pos_weight(sims.s_ap, rel.m_pos);
      out.p_neg = lin_neg_weight(sims.s_an, rel.m_neg);
      break;
  }
  return out;
}

double triplet_weight(TripletWeightKind kind, SimilarityPair sims, double tau) {
  switch (kind) {
    case TripletWeightKind::constant:
      return 0.5;
    case TripletWeightKind::cosine:
      return 1.0 / (1.0 + guarded_exp(tau * (sims.s_ap - sims.s_an)));
    case TripletWeightKind::circle:
      return 1.0 /
             (1.0 + guarded_exp(tau * (sims.s_ap * (2.0 - sims.s_ap) - sims.s_an * sims.s_an)));
  }
  return 0.0;
}

MaskAction positive_mask(MaskKind kind, SimilarityPair sims) {
  switch (kind) {
    case MaskKind::none:
      return MaskAction::keep;
    case MaskKind::sc1:
      return sims.s_an > sims.s_ap ? MaskAction::zero : MaskAction::keep;
    case MaskKind::sc2:
      return sims.s_ap * (2.0 - sims.s_ap) - sims.s_an * sims.s_an > 0.5 ? MaskAction::zero
                                                                         : MaskAction::keep;
  }
  return MaskAction::keep;
}

TripletUpdate compose(const SurgeryConfig& cfg, const Embedding& f_a, const Embedding& f_p,
                      const Embedding& f_n, const RelativeStats& rel) {
  const DirectionSet dirs = unit_directions(cfg.direction, f_a, f_p, f_n);
  const SimilarityPair sims{cosine_similarity(f_a, f_p), cosine_similarity(f_a, f_n)};

  const double t = triplet_weight(cfg.triplet_weight, sims, cfg.tau);
  PairWeights pw = pair_weights(cfg.pair_weight, sims, cfg, rel);
  if (positive_mask(cfg.mask, sims) == MaskAction::zero) pw.p_pos = 0.0;

  TripletUpdate up;
  // A masked positive pair yields the exact zero vector, not a scaled one.
  up.g_p = pw.p_pos == 0.0 ? Vec(f_a.dim(), 0.0) : scaled(dirs.e_p, t * pw.p_pos);
  up.g_n = scaled(dirs.e_n, t * pw.p_neg);
  up.g_a = pw.p_pos == 0.0 ? Vec(f_a.dim(), 0.0) : scaled(dirs.e_ap, t * pw.p_pos);
  axpy(t * pw.p_neg, dirs.e_an, up.g_a);
  return up;
}

TripletUpdate compose(const SurgeryConfig& cfg, const Embedding& f_a, const Embedding& f_p,
                      const Embedding& f_n) {
  const auto form = relative_form_for(cfg.pair_weight);
  return compose(cfg, f_a, f_p, f_n,
                 empty_relative_stats(form ? *form : RelativeForm::sigmoid));
}

SurgeryConfig best_combination_preset() {
  SurgeryConfig cfg;
  cfg.direction = DirectionKind::cosine_orthogonal;
  cfg.pair_weight = PairWeightKind::linear_ms;
  cfg.triplet_weight = TripletWeightKind::circle;
  cfg.mask = MaskKind::none;
  return cfg;
}

}  // namespace gradsurg
