#pragma once

#include "gradsurg/geometry.hpp"

namespace gradsurg {

// Scalar parameters of the two reference losses.
struct LossParams {
  double margin = 0.2;  // hinge margin, >= 0
  double tau = 1.0;     // similarity scaling, > 0
};

enum class LossKind { euclidean, cosine };
enum class TripletRole { anchor, positive, negative };

// Hinged squared-distance triplet loss:
//   max(||f_a - f_p||^2 - ||f_a - f_n||^2 + margin, 0).
// Operates on raw vectors; inputs need not be unit length.
double triplet_loss_euclidean(const Vec& f_a, const Vec& f_p, const Vec& f_n, double margin);

// Softmax triplet loss on raw dot products, evaluated in the numerically
// stable log1p-of-exponential form: log(1 + exp(tau * (s_an - s_ap))).
double triplet_loss_cosine(const Vec& f_a, const Vec& f_p, const Vec& f_n, double tau);

double triplet_loss(LossKind kind, const LossParams& params, const Vec& f_a, const Vec& f_p,
                    const Vec& f_n);

// Central-difference gradient of the selected loss with respect to one
// triplet member: component k is (L(x + h e_k) - L(x - h e_k)) / (2h).
// Intended step sizes are h in [1e-7, 1e-3].
Vec numeric_gradient(LossKind kind, const LossParams& params, const Vec& f_a, const Vec& f_p,
                     const Vec& f_n, TripletRole wrt, double h);

}  // namespace gradsurg
