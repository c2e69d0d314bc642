#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbl/feature_vector.hpp"

namespace sbl {

struct Assignment {
  std::vector<int> labels;  // per-point cluster index in [0, k)
  std::vector<FeatureVector> centroids;
  double sse = 0.0;
  int iterations = 0;
  std::vector<double> sse_history;  // one entry per iteration, non-increasing
};

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // converged when the largest centroid shift drops below
  int restarts = 10;  // k-means++ restarts; lowest SSE wins, ties keep the first
};

// Lloyd iterations with k-means++ seeding. Deterministic in (points, k, seed).
// Ties in point assignment go to the lowest centroid index; empty clusters are
// repaired mid-run by donating the farthest point of the largest cluster.
// Requires 1 <= k <= number of distinct points.
Assignment kmeans(std::span<const FeatureVector> points, int k, std::uint64_t seed,
                  const KMeansOptions& options = {});

std::size_t count_distinct(std::span<const FeatureVector> points);

}  // namespace sbl
