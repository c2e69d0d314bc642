#include "sbl/silhouette.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sbl/kmeans.hpp"
#include "sbl/parallel.hpp"
#include "sbl/rng.hpp"

namespace sbl {

double silhouette_score(std::span<const FeatureVector> points, std::span<const int> labels) {
  const std::size_t n = points.size();
  if (labels.size() != n) throw std::invalid_argument("silhouette: labels/points size mismatch");
  if (n == 0) throw std::invalid_argument("silhouette: empty input");

  int k = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("silhouette: negative cluster index");
    k = std::max(k, l + 1);
  }
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) sizes[static_cast<std::size_t>(l)] += 1;
  int non_empty = 0;
  for (int s : sizes)
    if (s > 0) non_empty += 1;
  if (non_empty < 2) throw std::invalid_argument("silhouette: needs at least 2 non-empty clusters");

  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[static_cast<std::size_t>(labels[j])] += dist(points[i], points[j]);
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] == 1) continue;  // singleton convention: s(i) = 0
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

KSweepResult optimal_k(std::span<const FeatureVector> points, std::uint64_t seed, int k_min,
                       int k_max, int threads) {
  if (k_min < 2) throw std::invalid_argument("optimal_k: k_min must be >= 2");
  if (k_max < k_min) throw std::invalid_argument("optimal_k: k_max must be >= k_min");
  const std::size_t distinct = count_distinct(points);
  if (distinct < static_cast<std::size_t>(k_min))
    throw std::invalid_argument("optimal_k: fewer distinct points than k_min");
  const int k_hi = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k_max), distinct));

  const int count = k_hi - k_min + 1;
  std::vector<double> scores(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](int idx) {
    const int k = k_min + idx;
    Assignment a = kmeans(points, k, derive_seed(seed, static_cast<std::uint64_t>(k)));
    scores[static_cast<std::size_t>(idx)] = silhouette_score(points, a.labels);
  });

  KSweepResult result;
  result.best_k = k_min;
  result.best_score = scores[0];
  for (int idx = 0; idx < count; ++idx) {
    const int k = k_min + idx;
    result.scores[k] = scores[static_cast<std::size_t>(idx)];
    if (scores[static_cast<std::size_t>(idx)] > result.best_score) {
      result.best_score = scores[static_cast<std::size_t>(idx)];
      result.best_k = k;
    }
  }
  return result;
}

}  // namespace sbl
