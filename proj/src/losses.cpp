#include "gradsurg/losses.hpp"

#include <cmath>

namespace gradsurg {

namespace {

double squared_distance(const Vec& u, const Vec& v) {
  const Vec d = sub(u, v);
  return dot(d, d);
}

// log(1 + exp(x)) without overflow for large |x|.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

double triplet_loss_euclidean(const Vec& f_a, const Vec& f_p, const Vec& f_n, double margin) {
  const double gap = squared_distance(f_a, f_p) - squared_distance(f_a, f_n) + margin;
  return std::max(gap, 0.0);
}

double triplet_loss_cosine(const Vec& f_a, const Vec& f_p, const Vec& f_n, double tau) {
  const double s_ap = dot(f_a, f_p);
  const double s_an = dot(f_a, f_n);
  return softplus(tau * (s_an - s_ap));
}

double triplet_loss(LossKind kind, const LossParams& params, const Vec& f_a, const Vec& f_p,
                    const Vec& f_n) {
  return kind == LossKind::euclidean ? triplet_loss_euclidean(f_a, f_p, f_n, params.margin)
                                     : triplet_loss_cosine(f_a, f_p, f_n, params.tau);
}

Vec numeric_gradient(LossKind kind, const LossParams& params, const Vec& f_a, const Vec& f_p,
                     const Vec& f_n, TripletRole wrt, double h) {
  Vec a = f_a;
  Vec p = f_p;
  Vec n = f_n;
  Vec* target = wrt == TripletRole::anchor ? &a : (wrt == TripletRole::positive ? &p : &n);

  Vec grad(target->size());
  for (std::size_t k = 0; k < target->size(); ++k) {
    const double saved = (*target)[k];
    (*target)[k] = saved + h;
    const double up = triplet_loss(kind, params, a, p, n);
    (*target)[k] = saved - h;
    const double down = triplet_loss(kind, params, a, p, n);
    (*target)[k] = saved;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace gradsurg
