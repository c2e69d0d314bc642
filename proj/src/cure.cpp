#include "sbl/cure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "sbl/rng.hpp"

namespace sbl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const CureParams& p, std::size_t n) {
  if (p.num_reps < 1) throw std::invalid_argument("cure: num_reps must be >= 1");
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("cure: alpha must be in [0, 1]");
  if (p.target_k < 1) throw std::invalid_argument("cure: target_k must be >= 1");
  if (!(p.sample_fraction > 0.0 && p.sample_fraction <= 1.0))
    throw std::invalid_argument("cure: sample_fraction must be in (0, 1]");
  if (p.outlier_min_size < 0) throw std::invalid_argument("cure: outlier_min_size must be >= 0");
  if (n == 0) throw std::invalid_argument("cure: empty input");
  if (static_cast<std::size_t>(p.target_k) > n)
    throw std::invalid_argument("cure: target_k exceeds the number of points");
}

double min_rep_sqdist(const std::vector<FeatureVector>& a, const std::vector<FeatureVector>& b) {
  double best = kInf;
  for (const FeatureVector& ra : a)
    for (const FeatureVector& rb : b) best = std::min(best, sq_dist(ra, rb));
  return best;
}

// Agglomeration over one point set. Each live cluster tracks its nearest
// neighbour; a lazily invalidated min-heap surfaces the global closest pair.
// Pair distances are cached in a triangular matrix so a stale nearest pointer
// costs one flat row scan, not a representative-pair recomputation.
class Agglomerator {
 public:
  Agglomerator(std::span<const FeatureVector> pts, const CureParams& p) : pts_(pts), p_(p) {
    n_ = static_cast<int>(pts.size());
    members_.resize(static_cast<std::size_t>(n_));
    centroid_.resize(static_cast<std::size_t>(n_));
    reps_.resize(static_cast<std::size_t>(n_));
    alive_.assign(static_cast<std::size_t>(n_), true);
    stamp_.assign(static_cast<std::size_t>(n_), 0);
    closest_.assign(static_cast<std::size_t>(n_), -1);
    closest_sq_.assign(static_cast<std::size_t>(n_), kInf);
    for (int i = 0; i < n_; ++i) {
      members_[static_cast<std::size_t>(i)] = {i};
      centroid_[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(i)];
      reps_[static_cast<std::size_t>(i)] = {pts[static_cast<std::size_t>(i)]};
    }
    if (n_ >= 2) {
      tri_.assign(static_cast<std::size_t>(n_) * (static_cast<std::size_t>(n_) - 1) / 2, 0.0);
      for (int i = 1; i < n_; ++i)
        for (int j = 0; j < i; ++j)
          tri_[tri_index(i, j)] =
              sq_dist(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      for (int i = 0; i < n_; ++i) rescan_closest(i);
    }
  }

  // Merges until `target` clusters remain; returns live slot ids ascending.
  // Dissolved outlier members are appended to `outliers`.
  std::vector<int> run(int target, std::vector<int>& outliers) {
    int alive_count = n_;
    const int total_merges = n_ - target;
    const int checkpoint =
        (p_.outlier_elimination && total_merges >= 3) ? total_merges / 3 : -1;
    int merges = 0;
    bool dissolved = false;

    while (alive_count > target) {
      if (!dissolved && merges == checkpoint) {
        dissolved = true;
        for (int i = 0; i < n_ && alive_count > target; ++i) {
          auto iu = static_cast<std::size_t>(i);
          if (!alive_[iu]) continue;
          if (static_cast<int>(members_[iu].size()) >= p_.outlier_min_size) continue;
          alive_[iu] = false;
          alive_count -= 1;
          outliers.insert(outliers.end(), members_[iu].begin(), members_[iu].end());
          members_[iu].clear();
        }
        if (alive_count <= target) break;
      }

      if (heap_.empty()) throw std::logic_error("cure: merge heap drained early");
      Entry e = heap_.top();
      heap_.pop();
      auto au = static_cast<std::size_t>(e.a);
      if (!alive_[au] || stamp_[au] != e.stamp) continue;
      const int partner = closest_[au];
      if (!alive_[static_cast<std::size_t>(partner)]) {
        rescan_closest(e.a);
        continue;
      }
      merge(e.a, partner);
      merges += 1;
      alive_count -= 1;
      if (heap_.size() > std::max<std::size_t>(4096, 8 * static_cast<std::size_t>(n_)))
        rebuild_heap();
    }

    std::vector<int> live;
    for (int i = 0; i < n_; ++i)
      if (alive_[static_cast<std::size_t>(i)]) live.push_back(i);
    return live;
  }

  const std::vector<int>& members(int slot) const { return members_[static_cast<std::size_t>(slot)]; }
  const std::vector<FeatureVector>& reps(int slot) const { return reps_[static_cast<std::size_t>(slot)]; }

 private:
  struct Entry {
    double d;
    int a;
    int b;
    std::uint32_t stamp;
  };
  struct EntryCmp {
    bool operator()(const Entry& x, const Entry& y) const {
      if (x.d != y.d) return x.d > y.d;
      int xl = std::min(x.a, x.b), xh = std::max(x.a, x.b);
      int yl = std::min(y.a, y.b), yh = std::max(y.a, y.b);
      if (xl != yl) return xl > yl;
      return xh > yh;
    }
  };

  std::size_t tri_index(int i, int j) const {
    int hi = i > j ? i : j;
    int lo = i > j ? j : i;
    return static_cast<std::size_t>(hi) * (static_cast<std::size_t>(hi) - 1) / 2 +
           static_cast<std::size_t>(lo);
  }

  void push_entry(int a) {
    heap_.push(Entry{closest_sq_[static_cast<std::size_t>(a)], a,
                     closest_[static_cast<std::size_t>(a)], stamp_[static_cast<std::size_t>(a)]});
  }

  // Flat argmin over the cached row; ascending scan keeps ties on the lowest id.
  void rescan_closest(int a) {
    auto au = static_cast<std::size_t>(a);
    double best = kInf;
    int best_j = -1;
    for (int j = 0; j < n_; ++j) {
      if (j == a || !alive_[static_cast<std::size_t>(j)]) continue;
      double d = tri_[tri_index(a, j)];
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    closest_[au] = best_j;
    closest_sq_[au] = best;
    stamp_[au] += 1;
    if (best_j >= 0) push_entry(a);
  }

  void refresh_reps(int slot) {
    auto su = static_cast<std::size_t>(slot);
    const std::vector<int>& m = members_[su];
    FeatureVector c{};
    for (int idx : m)
      for (std::size_t f = 0; f < kNumFeatures; ++f) c[f] += pts_[static_cast<std::size_t>(idx)][f];
    for (std::size_t f = 0; f < kNumFeatures; ++f) c[f] /= static_cast<double>(m.size());
    centroid_[su] = c;

    member_points_.clear();
    for (int idx : m) member_points_.push_back(pts_[static_cast<std::size_t>(idx)]);
    reps_[su] = shrink_reps(select_representatives(member_points_, c, p_.num_reps), c, p_.alpha);
  }

  void merge(int u, int v) {
    const int m = std::min(u, v);
    const int dead = std::max(u, v);
    auto mu = static_cast<std::size_t>(m);
    auto du = static_cast<std::size_t>(dead);

    std::vector<int> merged;
    merged.reserve(members_[mu].size() + members_[du].size());
    std::merge(members_[mu].begin(), members_[mu].end(), members_[du].begin(), members_[du].end(),
               std::back_inserter(merged));
    members_[mu] = std::move(merged);
    members_[du].clear();
    alive_[du] = false;
    refresh_reps(m);
    stamp_[mu] += 1;

    double best = kInf;
    int best_j = -1;
    for (int j = 0; j < n_; ++j) {
      auto ju = static_cast<std::size_t>(j);
      if (j == m || !alive_[ju]) continue;
      const double d = min_rep_sqdist(reps_[mu], reps_[ju]);
      tri_[tri_index(m, j)] = d;
      if (d < best) {
        best = d;
        best_j = j;
      }
      if (closest_[ju] == u || closest_[ju] == v) {
        // Pointed into the merged pair; its old distance is stale.
        if (d <= closest_sq_[ju]) {
          closest_[ju] = m;
          closest_sq_[ju] = d;
          stamp_[ju] += 1;
          push_entry(j);
        } else {
          rescan_closest(j);
        }
      } else if (d < closest_sq_[ju] || (d == closest_sq_[ju] && m < closest_[ju])) {
        closest_[ju] = m;
        closest_sq_[ju] = d;
        stamp_[ju] += 1;
        push_entry(j);
      }
    }
    closest_[mu] = best_j;
    closest_sq_[mu] = best;
    if (best_j >= 0) push_entry(m);
  }

  void rebuild_heap() {
    std::priority_queue<Entry, std::vector<Entry>, EntryCmp> fresh;
    for (int i = 0; i < n_; ++i) {
      auto iu = static_cast<std::size_t>(i);
      if (alive_[iu] && closest_[iu] >= 0)
        fresh.push(Entry{closest_sq_[iu], i, closest_[iu], stamp_[iu]});
    }
    heap_ = std::move(fresh);
  }

  std::span<const FeatureVector> pts_;
  CureParams p_;
  int n_ = 0;
  std::vector<std::vector<int>> members_;
  std::vector<FeatureVector> centroid_;
  std::vector<std::vector<FeatureVector>> reps_;
  std::vector<FeatureVector> member_points_;  // scratch
  std::vector<bool> alive_;
  std::vector<std::uint32_t> stamp_;
  std::vector<int> closest_;
  std::vector<double> closest_sq_;
  std::vector<double> tri_;
  std::priority_queue<Entry, std::vector<Entry>, EntryCmp> heap_;
};

}  // namespace

std::vector<FeatureVector> shrink_reps(std::span<const FeatureVector> scattered,
                                       const FeatureVector& centroid, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("shrink_reps: alpha must be in [0, 1]");
  std::vector<FeatureVector> out;
  out.reserve(scattered.size());
  for (const FeatureVector& p : scattered) {
    FeatureVector q;
    for (std::size_t f = 0; f < kNumFeatures; ++f) q[f] = p[f] + alpha * (centroid[f] - p[f]);
    out.push_back(q);
  }
  return out;
}

std::vector<FeatureVector> select_representatives(std::span<const FeatureVector> members,
                                                  const FeatureVector& centroid, int num_reps) {
  if (members.empty()) throw std::invalid_argument("select_representatives: no members");
  if (num_reps < 1) throw std::invalid_argument("select_representatives: num_reps must be >= 1");
  const std::size_t n = members.size();
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(num_reps), n);

  std::vector<FeatureVector> reps;
  reps.reserve(want);
  std::vector<double> min_d(n);
  std::size_t pick = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = sq_dist(members[i], centroid);
    if (d > best) {
      best = d;
      pick = i;
    }
  }
  reps.push_back(members[pick]);
  for (std::size_t i = 0; i < n; ++i) min_d[i] = sq_dist(members[i], members[pick]);

  while (reps.size() < want) {
    pick = 0;
    best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_d[i] > best) {
        best = min_d[i];
        pick = i;
      }
    }
    reps.push_back(members[pick]);
    for (std::size_t i = 0; i < n; ++i)
      min_d[i] = std::min(min_d[i], sq_dist(members[i], members[pick]));
  }
  return reps;
}

double cluster_distance(const CureCluster& a, const CureCluster& b) {
  if (a.reps.empty() || b.reps.empty())
    throw std::invalid_argument("cluster_distance: cluster without representatives");
  return std::sqrt(min_rep_sqdist(a.reps, b.reps));
}

std::vector<CureCluster> cure_cluster(std::span<const FeatureVector> points,
                                      const CureParams& params, std::uint64_t seed) {
  validate(params, points.size());
  const int n = static_cast<int>(points.size());

  // Optional sampling: cluster a deterministic sample, attach the rest later.
  std::vector<int> sampled(static_cast<std::size_t>(n));
  std::iota(sampled.begin(), sampled.end(), 0);
  std::vector<int> leftover;
  if (params.sample_fraction < 1.0) {
    int want = static_cast<int>(std::floor(params.sample_fraction * n));
    want = std::clamp(want, params.target_k, n);
    Rng rng(derive_seed(seed, 0xc43e));
    for (int i = 0; i < want; ++i) {
      std::size_t j = static_cast<std::size_t>(i) +
                      static_cast<std::size_t>(rng.next_int(static_cast<std::uint64_t>(n - i)));
      std::swap(sampled[static_cast<std::size_t>(i)], sampled[j]);
    }
    leftover.assign(sampled.begin() + want, sampled.end());
    sampled.resize(static_cast<std::size_t>(want));
    std::sort(sampled.begin(), sampled.end());
    std::sort(leftover.begin(), leftover.end());
  }

  std::vector<FeatureVector> local;
  local.reserve(sampled.size());
  for (int idx : sampled) local.push_back(points[static_cast<std::size_t>(idx)]);

  Agglomerator agg(local, params);
  std::vector<int> outlier_local;
  const std::vector<int> live = agg.run(params.target_k, outlier_local);

  std::vector<CureCluster> clusters;
  clusters.reserve(live.size());
  for (int slot : live) {
    CureCluster c;
    for (int local_idx : agg.members(slot))
      c.members.push_back(sampled[static_cast<std::size_t>(local_idx)]);
    c.reps = agg.reps(slot);
    clusters.push_back(std::move(c));
  }

  // Unsampled and dissolved points join the cluster with the nearest
  // representative (as clustered above; ties go to the earliest cluster).
  std::vector<int> extras = std::move(leftover);
  for (int local_idx : outlier_local)
    extras.push_back(sampled[static_cast<std::size_t>(local_idx)]);
  std::sort(extras.begin(), extras.end());
  for (int idx : extras) {
    std::size_t best_c = 0;
    double best_d = kInf;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (const FeatureVector& r : clusters[c].reps) {
        double d = sq_dist(points[static_cast<std::size_t>(idx)], r);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
    }
    clusters[best_c].members.push_back(idx);
  }

  // Final shape: sorted members, centroid over the full member set, and
  // representatives reselected from it so its documented invariants hold even
  // after post-hoc attachment.
  for (CureCluster& c : clusters) {
    std::sort(c.members.begin(), c.members.end());
    FeatureVector mean{};
    std::vector<FeatureVector> member_points;
    member_points.reserve(c.members.size());
    for (int idx : c.members) {
      member_points.push_back(points[static_cast<std::size_t>(idx)]);
      for (std::size_t f = 0; f < kNumFeatures; ++f)
        mean[f] += points[static_cast<std::size_t>(idx)][f];
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) mean[f] /= static_cast<double>(c.members.size());
    c.centroid = mean;
    c.reps = shrink_reps(select_representatives(member_points, mean, params.num_reps), mean,
                         params.alpha);
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const CureCluster& a, const CureCluster& b) { return a.members.front() < b.members.front(); });
  return clusters;
}

}  // namespace sbl
