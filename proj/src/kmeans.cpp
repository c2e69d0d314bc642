#include "sbl/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include "sbl/rng.hpp"

namespace sbl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<FeatureVector> kmeanspp_init(std::span<const FeatureVector> pts, int k, Rng& rng) {
  const std::size_t n = pts.size();
  std::vector<FeatureVector> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(pts[rng.next_int(n)]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(pts[i], centers[0]);

  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    if (!(total > 0.0))
      throw std::logic_error("k-means++ ran out of distinct points");  // k <= distinct rules this out
    double r = rng.next_double() * total;
    std::size_t pick = n;  // falls back to the last positive-weight point
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      cum += d2[i];
      pick = i;
      if (r < cum) break;
    }
    centers.push_back(pts[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(pts[i], centers.back()));
  }
  return centers;
}

void assign_nearest(std::span<const FeatureVector> pts, const std::vector<FeatureVector>& centers,
                    std::vector<int>& labels) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = 0;
    double best_d = sq_dist(pts[i], centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      double d = sq_dist(pts[i], centers[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
  }
}

// Moves the farthest point of the largest cluster into each empty cluster.
void repair_empty(std::span<const FeatureVector> pts, const std::vector<FeatureVector>& centers,
                  std::vector<int>& labels) {
  const int k = static_cast<int>(centers.size());
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) sizes[static_cast<std::size_t>(l)] += 1;
  for (int e = 0; e < k; ++e) {
    if (sizes[static_cast<std::size_t>(e)] > 0) continue;
    int donor = 0;
    for (int c = 1; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] > sizes[static_cast<std::size_t>(donor)]) donor = c;
    std::size_t far = pts.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (labels[i] != donor) continue;
      double d = sq_dist(pts[i], centers[static_cast<std::size_t>(donor)]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    labels[far] = e;
    sizes[static_cast<std::size_t>(e)] = 1;
    sizes[static_cast<std::size_t>(donor)] -= 1;
  }
}

double total_sse(std::span<const FeatureVector> pts, const std::vector<FeatureVector>& centers,
                 const std::vector<int>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    s += sq_dist(pts[i], centers[static_cast<std::size_t>(labels[i])]);
  return s;
}

Assignment lloyd(std::span<const FeatureVector> pts, int k, std::uint64_t seed,
                 const KMeansOptions& opt) {
  Rng rng(seed);
  const std::size_t n = pts.size();
  const std::size_t ku = static_cast<std::size_t>(k);

  Assignment a;
  a.centroids = kmeanspp_init(pts, k, rng);
  a.labels.assign(n, 0);

  double prev_sse = kInf;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    assign_nearest(pts, a.centroids, a.labels);
    repair_empty(pts, a.centroids, a.labels);

    std::vector<FeatureVector> next(ku, FeatureVector{});
    std::vector<int> sizes(ku, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(a.labels[i]);
      sizes[c] += 1;
      for (std::size_t f = 0; f < kNumFeatures; ++f) next[c][f] += pts[i][f];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < ku; ++c) {
      for (std::size_t f = 0; f < kNumFeatures; ++f) next[c][f] /= static_cast<double>(sizes[c]);
      shift = std::max(shift, dist(next[c], a.centroids[c]));
    }

    double sse = total_sse(pts, next, a.labels);
    if (sse > prev_sse * (1.0 + 1e-9) + 1e-12)
      throw std::logic_error("k-means SSE increased between iterations");
    a.sse_history.push_back(sse);
    prev_sse = sse;
    a.centroids = std::move(next);
    a.iterations = iter;
    if (shift < opt.tol) break;
  }

  // Final pass so every point sits with its nearest centroid.
  assign_nearest(pts, a.centroids, a.labels);
  a.sse = total_sse(pts, a.centroids, a.labels);
  if (a.sse > prev_sse * (1.0 + 1e-9) + 1e-12)
    throw std::logic_error("k-means SSE increased at the final assignment");
  a.sse_history.push_back(a.sse);
  return a;
}

}  // namespace

std::size_t count_distinct(std::span<const FeatureVector> points) {
  std::set<FeatureVector> s(points.begin(), points.end());
  return s.size();
}

Assignment kmeans(std::span<const FeatureVector> points, int k, std::uint64_t seed,
                  const KMeansOptions& options) {
  if (points.empty()) throw std::invalid_argument("k-means: empty input");
  if (k < 1) throw std::invalid_argument("k-means: k must be >= 1");
  if (options.max_iter < 1) throw std::invalid_argument("k-means: max_iter must be >= 1");
  if (options.tol < 0) throw std::invalid_argument("k-means: tol must be >= 0");
  if (options.restarts < 1) throw std::invalid_argument("k-means: restarts must be >= 1");
  if (static_cast<std::size_t>(k) > count_distinct(points))
    throw std::invalid_argument("k-means: k exceeds the number of distinct points");

  Assignment best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    Assignment a = lloyd(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)), options);
    if (!have || a.sse < best.sse) {
      best = std::move(a);
      have = true;
    }
  }
  return best;
}

}  // namespace sbl
