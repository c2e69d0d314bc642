#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbl/cure.hpp"

namespace sbl {

// Grid of CURE settings to try per subset.
struct SweepGrid {
  std::vector<int> rp_values = {5, 10};
  std::vector<double> alpha_values = {0.1, 0.05, 0.01, 0.001};
  int min_cluster_size = 5;  // a cluster counts as non-trivial at this size
};

struct SweepCell {
  int rp = 0;
  double alpha = 0.0;
  bool ok = false;
  std::string error;       // set when the cell failed and was disqualified
  std::vector<int> sizes;  // cluster sizes in cluster order
  int large_clusters = 0;  // sizes >= min_cluster_size
  double size_entropy = 0.0;
  bool chosen = false;
};

struct SweepResult {
  int rp = 0;
  double alpha = 0.0;
  std::vector<CureCluster> clusters;  // the chosen cell's clustering
  std::vector<SweepCell> report;      // one row per grid cell, grid order
};

// Selection criterion: prefer the cell with the most clusters of size >=
// min_cluster_size, break ties by the Shannon entropy of the size
// distribution, then by grid order. Returns (large_clusters, entropy).
std::pair<int, double> sweep_score(const std::vector<int>& sizes, int min_cluster_size);

// Scalar rendering of the criterion for reports: large_clusters plus the
// entropy normalized by ln(k).
double sweep_display_score(const SweepCell& cell, int target_k);

// Runs cure_cluster for every (rp, alpha) cell with a per-cell derived seed
// and returns the best clustering plus the full grid report. A failed cell is
// disqualified without aborting the sweep; if every cell fails, DataError
// carries the first error. Cells run on up to `threads` workers.
SweepResult sweep_params(std::span<const FeatureVector> points, int target_k,
                         const SweepGrid& grid, std::uint64_t seed,
                         const CureParams& base = {}, int threads = 0);

}  // namespace sbl
