#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gradsurg/surgery.hpp"

namespace gradsurg {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // suite-specific error measure
  double bound = 0.0;      // the threshold max_error is held against
  std::string detail;
};

using TripletWeightFn = std::function<double(TripletWeightKind, SimilarityPair, double)>;

// Composed euclidean-family update against a quarter of the finite-difference
// gradient of the hinged squared-distance loss, all three roles.
SuiteResult verify_euclidean_gradient(std::uint64_t seed);

// Composed cosine-family update against 1/tau times the finite-difference
// gradient of the softmax loss, tau in {1, 5}, all three roles.
SuiteResult verify_cosine_gradient(std::uint64_t seed);

// Orthogonalized negative directions: unit length and zero dot product with
// the anchor-positive displacement.
SuiteResult verify_orthogonality(std::uint64_t seed);

// parallel_length^2 + effective_strength^2 = 1 across the similarity range,
// plus the crossing of the two strengths at s = 0.5.
SuiteResult verify_projection_lengths();

// Frozen closed-form pair-weight values and the empty-set reductions of the
// ms forms.
SuiteResult verify_pair_weights();

// Triplet weight values, range, and monotonicity. A candidate can be
// substituted to prove the suite catches a corrupted implementation.
SuiteResult verify_triplet_weights(const TripletWeightFn& candidate = {});

// Bitwise ms reductions and exact mask behavior on composed updates.
SuiteResult verify_reductions(std::uint64_t seed);

// Mining and retrieval against exhaustive brute-force oracles on small
// random instances.
SuiteResult verify_small_instance_oracles(std::uint64_t seed);

std::vector<SuiteResult> run_verification(std::uint64_t seed = 20240601);

void print_report(const std::vector<SuiteResult>& results, std::ostream& out);
bool all_passed(const std::vector<SuiteResult>& results);

}  // namespace gradsurg
