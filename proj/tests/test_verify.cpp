#include <cmath>
#include <sstream>

#include "doctest.h"
#include "gradsurg/verify.hpp"

using namespace gradsurg;

TEST_SUITE_BEGIN("verify");

TEST_CASE("all verification suites pass on the real implementation") {
  const std::vector<SuiteResult> results = run_verification(987654321);
  for (const auto& r : results) {
    INFO(r.name, ": max_err=", r.max_error, " detail=", r.detail);
    CHECK(r.passed);
  }
  CHECK(all_passed(results));
}

TEST_CASE("a corrupted triplet weight is caught") {
  // Sign flip inside the exponent: the weight favors the wrong triplets.
  const TripletWeightFn corrupted = [](TripletWeightKind kind, SimilarityPair sims, double tau) {
    if (kind == TripletWeightKind::cosine) {
      return 1.0 / (1.0 + std::exp(-tau * (sims.s_ap - sims.s_an)));
    }
    return triplet_weight(kind, sims, tau);
  };
  const SuiteResult res = verify_triplet_weights(corrupted);
  CHECK(!res.passed);
  CHECK(res.max_error > res.bound);
}

TEST_CASE("the report prints one line per suite with numeric fields") {
  std::vector<SuiteResult> results{
      {"alpha-suite", true, 1.5e-7, 1e-4, "detail a"},
      {"beta-suite", false, 2.0, 1e-9, "detail b"},
  };
  std::ostringstream out;
  print_report(results, out);
  const std::string text = out.str();
  CHECK(text.find("alpha-suite") != std::string::npos);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);
  CHECK(text.find("max_err=") != std::string::npos);
  CHECK(text.find("1/2 suites passed") != std::string::npos);
  CHECK(!all_passed(results));
}

TEST_SUITE_END();
