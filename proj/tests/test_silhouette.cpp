#include <doctest.h>

#include "oracles.hpp"
#include "sbl/rng.hpp"
#include "sbl/silhouette.hpp"

using namespace sbl;

TEST_CASE("hand-computed line example") {
  // {0, 1} vs {10, 11}: s = (19/21 + 17/19 + 17/19 + 19/21) / 4 = 359/399.
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({1}), oracle::pt({10}),
                                    oracle::pt({11})};
  std::vector<int> labels = {0, 0, 1, 1};
  CHECK(silhouette_score(pts, labels) == doctest::Approx(359.0 / 399.0).epsilon(1e-12));
}

TEST_CASE("perfectly separated coincident clusters score 1") {
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({0}), oracle::pt({5}),
                                    oracle::pt({5})};
  std::vector<int> labels = {0, 0, 1, 1};
  CHECK(silhouette_score(pts, labels) == doctest::Approx(1.0));
}

TEST_CASE("fully coincident points in two clusters score 0") {
  std::vector<FeatureVector> pts(4, oracle::pt({0.5}));
  std::vector<int> labels = {0, 0, 1, 1};
  CHECK(silhouette_score(pts, labels) == doctest::Approx(0.0));
}

TEST_CASE("a single cluster is a domain error") {
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({1})};
  std::vector<int> labels = {0, 0};
  CHECK_THROWS_AS(silhouette_score(pts, labels), std::invalid_argument);
}

TEST_CASE("singleton clusters contribute zero") {
  // {0}, {10, 11}: s(0) = 0 by convention.
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({10}), oracle::pt({11})};
  std::vector<int> labels = {0, 1, 1};
  // s(10): a = 1, b = 10  -> 0.9 ; s(11): a = 1, b = 11 -> 10/11
  double expected = (0.0 + 0.9 + 10.0 / 11.0) / 3.0;
  CHECK(silhouette_score(pts, labels) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("scores stay within [-1, 1] and ignore point order") {
  Rng rng(42);
  std::vector<FeatureVector> pts;
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) {
    FeatureVector p{};
    for (auto& v : p) v = rng.next_double();
    pts.push_back(p);
    labels.push_back(static_cast<int>(rng.next_int(4)));
  }
  // Make sure two clusters are non-empty.
  labels[0] = 0;
  labels[1] = 1;
  double s = silhouette_score(pts, labels);
  CHECK(s >= -1.0);
  CHECK(s <= 1.0);

  // Permute both arrays the same way.
  std::vector<int> perm(pts.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  rng.shuffle(perm);
  std::vector<FeatureVector> pts2;
  std::vector<int> labels2;
  for (int i : perm) {
    pts2.push_back(pts[static_cast<std::size_t>(i)]);
    labels2.push_back(labels[static_cast<std::size_t>(i)]);
  }
  CHECK(silhouette_score(pts2, labels2) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("optimal_k recovers five separated blobs") {
  std::vector<FeatureVector> centers = {
      oracle::pt({0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1}),
      oracle::pt({0.9, 0.1, 0.5, 0.2, 0.8, 0.3, 0.1, 0.6}),
      oracle::pt({0.2, 0.9, 0.1, 0.7, 0.3, 0.8, 0.5, 0.2}),
      oracle::pt({0.7, 0.6, 0.9, 0.1, 0.2, 0.1, 0.9, 0.8}),
      oracle::pt({0.4, 0.3, 0.6, 0.9, 0.6, 0.7, 0.3, 0.4})};
  auto pts = oracle::gaussian_blobs(centers, 40, 0.01, 5150);
  auto result = optimal_k(pts, 321, 2, 12);
  CHECK(result.best_k == 5);
  CHECK(result.scores.size() == 11);
  for (const auto& [k, score] : result.scores) {
    CHECK(score >= -1.0);
    CHECK(score <= 1.0);
  }
  CHECK(result.best_score == result.scores.at(result.best_k));
}

TEST_CASE("two distinct points sweep to best_k = 2 with score 0") {
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({1})};
  auto result = optimal_k(pts, 9, 2, 2);
  CHECK(result.best_k == 2);
  CHECK(result.best_score == doctest::Approx(0.0));  // two singletons
}

TEST_CASE("optimal_k clamps the sweep to the distinct point count") {
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({1}), oracle::pt({2})};
  auto result = optimal_k(pts, 9, 2, 20);
  CHECK(result.scores.size() == 2);  // k in {2, 3}
  CHECK(result.scores.count(2) == 1);
  CHECK(result.scores.count(3) == 1);
}

TEST_CASE("optimal_k requires k_min distinct points") {
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({0})};
  CHECK_THROWS_AS(optimal_k(pts, 1, 2, 20), std::invalid_argument);
}

TEST_CASE("best_k is the smallest argmax") {
  // Symmetric four points: k = 2 and k = 4 both score well; assert the
  // reported best is the argmax, and on ties the smaller k.
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({0.1}), oracle::pt({10}),
                                    oracle::pt({10.1})};
  auto result = optimal_k(pts, 4, 2, 4);
  double best = -2;
  int first_argmax = 0;
  for (const auto& [k, score] : result.scores)
    if (score > best) {
      best = score;
      first_argmax = k;
    }
  CHECK(result.best_k == first_argmax);
  CHECK(result.best_score == doctest::Approx(best));
}
