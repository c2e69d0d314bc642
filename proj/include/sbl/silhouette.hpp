#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "sbl/feature_vector.hpp"

namespace sbl {

// Mean silhouette over all points: s(i) = (b(i) - a(i)) / max(a(i), b(i))
// with a(i) the mean distance to the point's own cluster and b(i) the lowest
// mean distance to any other cluster. Points in singleton clusters score 0,
// as does the fully degenerate a = b = 0 case. Requires at least two
// non-empty clusters.
double silhouette_score(std::span<const FeatureVector> points, std::span<const int> labels);

struct KSweepResult {
  std::map<int, double> scores;  // k -> mean silhouette
  int best_k = 0;                // argmax of scores; ties go to the smallest k
  double best_score = 0.0;
};

// Sweeps k-means over k in [k_min, min(k_max, distinct points)] and scores
// each clustering. Deterministic in seed; per-k runs are independent and run
// on up to `threads` workers. Throws std::invalid_argument when the input has
// fewer distinct points than k_min.
KSweepResult optimal_k(std::span<const FeatureVector> points, std::uint64_t seed, int k_min = 2,
                       int k_max = 20, int threads = 0);

}  // namespace sbl
