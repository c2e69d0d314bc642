#include "sbl/sweep.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "sbl/errors.hpp"
#include "sbl/parallel.hpp"
#include "sbl/rng.hpp"

namespace sbl {

std::pair<int, double> sweep_score(const std::vector<int>& sizes, int min_cluster_size) {
  int large = 0;
  double total = 0.0;
  for (int s : sizes) {
    if (s >= min_cluster_size) large += 1;
    total += s;
  }
  double entropy = 0.0;
  for (int s : sizes) {
    if (s <= 0) continue;
    double p = s / total;
    entropy -= p * std::log(p);
  }
  return {large, entropy};
}

double sweep_display_score(const SweepCell& cell, int target_k) {
  double norm = target_k > 1 ? std::log(static_cast<double>(target_k)) : 1.0;
  return cell.large_clusters + cell.size_entropy / norm;
}

SweepResult sweep_params(std::span<const FeatureVector> points, int target_k,
                         const SweepGrid& grid, std::uint64_t seed, const CureParams& base,
                         int threads) {
  if (grid.rp_values.empty() || grid.alpha_values.empty())
    throw std::invalid_argument("sweep: empty parameter grid");
  for (double a : grid.alpha_values)
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("sweep: alpha outside [0, 1]");
  for (int rp : grid.rp_values)
    if (rp < 1) throw std::invalid_argument("sweep: rp must be >= 1");
  if (grid.min_cluster_size < 1) throw std::invalid_argument("sweep: min_cluster_size must be >= 1");

  const int cell_count =
      static_cast<int>(grid.rp_values.size() * grid.alpha_values.size());
  SweepResult result;
  result.report.resize(static_cast<std::size_t>(cell_count));
  std::vector<std::vector<CureCluster>> clusterings(static_cast<std::size_t>(cell_count));

  parallel_for(cell_count, threads, [&](int i) {
    const int rp = grid.rp_values[static_cast<std::size_t>(i) / grid.alpha_values.size()];
    const double alpha = grid.alpha_values[static_cast<std::size_t>(i) % grid.alpha_values.size()];
    SweepCell& cell = result.report[static_cast<std::size_t>(i)];
    cell.rp = rp;
    cell.alpha = alpha;
    try {
      CureParams params = base;
      params.num_reps = rp;
      params.alpha = alpha;
      params.target_k = target_k;
      const std::uint64_t cell_seed =
          derive_seed(seed, static_cast<std::uint64_t>(rp), std::bit_cast<std::uint64_t>(alpha));
      auto clusters = cure_cluster(points, params, cell_seed);
      for (const CureCluster& c : clusters) cell.sizes.push_back(static_cast<int>(c.members.size()));
      auto [large, entropy] = sweep_score(cell.sizes, grid.min_cluster_size);
      cell.large_clusters = large;
      cell.size_entropy = entropy;
      cell.ok = true;
      clusterings[static_cast<std::size_t>(i)] = std::move(clusters);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  int best = -1;
  for (int i = 0; i < cell_count; ++i) {
    const SweepCell& cell = result.report[static_cast<std::size_t>(i)];
    if (!cell.ok) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const SweepCell& cur = result.report[static_cast<std::size_t>(best)];
    if (cell.large_clusters > cur.large_clusters ||
        (cell.large_clusters == cur.large_clusters && cell.size_entropy > cur.size_entropy))
      best = i;
  }
  if (best < 0) {
    std::string first;
    for (const SweepCell& cell : result.report)
      if (!cell.error.empty()) {
        first = cell.error;
        break;
      }
    throw DataError("sweep: every grid cell failed; first error: " + first);
  }

  result.report[static_cast<std::size_t>(best)].chosen = true;
  result.rp = result.report[static_cast<std::size_t>(best)].rp;
  result.alpha = result.report[static_cast<std::size_t>(best)].alpha;
  result.clusters = std::move(clusterings[static_cast<std::size_t>(best)]);
  return result;
}

}  // namespace sbl
