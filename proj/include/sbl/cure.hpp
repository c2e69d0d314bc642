#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbl/feature_vector.hpp"

namespace sbl {

struct CureParams {
  int num_reps = 10;    // representative points per cluster
  double alpha = 0.3;   // shrink factor towards the centroid, in [0, 1]
  int target_k = 1;     // stop merging at this many clusters
  double sample_fraction = 1.0;  // < 1 clusters a sample; the rest is attached
                                 // to the cluster with the nearest representative
  bool outlier_elimination = false;
  int outlier_min_size = 3;  // clusters smaller than this dissolve at the
                             // one-third-merge checkpoint
};

struct CureCluster {
  std::vector<int> members;  // input indices, ascending
  FeatureVector centroid{};  // coordinate-wise mean of members
  std::vector<FeatureVector> reps;  // shrunken scattered points,
                                    // min(num_reps, |members|) of them
};

// p' = p + alpha * (centroid - p) for each scattered point.
std::vector<FeatureVector> shrink_reps(std::span<const FeatureVector> scattered,
                                       const FeatureVector& centroid, double alpha);

// Farthest-point traversal: the first pick maximizes distance to the
// centroid, each later pick maximizes the minimum distance to the picks so
// far. Ties go to the earliest member. Returns min(num_reps, |members|)
// points.
std::vector<FeatureVector> select_representatives(std::span<const FeatureVector> members,
                                                  const FeatureVector& centroid, int num_reps);

// Minimum Euclidean distance over all representative pairs.
double cluster_distance(const CureCluster& a, const CureCluster& b);

// Agglomerative clustering: every point starts as its own cluster and the
// globally closest pair (by cluster_distance) merges until target_k clusters
// remain. Representatives are reselected from the merged member set after
// each merge. Distance ties break towards the lexicographically smallest
// cluster-id pair, so runs are bit-reproducible given (points, params, seed).
// The merge frontier is tracked with a nearest-neighbour min-heap over a
// cached pair-distance matrix, keeping the whole run at O(N^2 log N).
std::vector<CureCluster> cure_cluster(std::span<const FeatureVector> points,
                                      const CureParams& params, std::uint64_t seed);

}  // namespace sbl
