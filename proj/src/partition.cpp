#include "sbl/partition.hpp"

#include <cmath>
#include <stdexcept>

#include "sbl/csv.hpp"
#include "sbl/errors.hpp"

namespace sbl {

namespace {

Subset& subset_for(std::map<std::int64_t, Subset>& map, std::int64_t seconds) {
  auto [it, inserted] = map.try_emplace(seconds);
  if (inserted) {
    it->second.duration_seconds = seconds;
    it->second.duration_days = static_cast<double>(seconds) / kSecondsPerDay;
  }
  return it->second;
}

}  // namespace

std::map<std::int64_t, Subset> partition_by_duration(const std::vector<SBInstance>& instances,
                                                     const CleanDataset& dataset) {
  std::map<std::int64_t, Subset> out;
  for (const SBInstance& inst : instances) {
    auto it = dataset.auction_index.find(inst.auction_id);
    if (it == dataset.auction_index.end())
      throw DataError("instance references unknown auction " + inst.auction_id);
    subset_for(out, it->second.duration_seconds).instances.push_back(inst);
  }
  return out;
}

std::map<std::int64_t, Subset> partition_by_days(const std::vector<SBInstance>& instances,
                                                 const std::vector<double>& days) {
  if (instances.size() != days.size())
    throw std::invalid_argument("instances and day counts differ in length");
  std::map<std::int64_t, Subset> out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (days[i] < 0) throw DataError("negative duration_days for auction " + instances[i].auction_id);
    auto seconds = static_cast<std::int64_t>(std::llround(days[i] * kSecondsPerDay));
    subset_for(out, seconds).instances.push_back(instances[i]);
  }
  return out;
}

SubsetStats compute_stats(const std::vector<SBInstance>& instances) {
  if (instances.empty()) throw std::invalid_argument("cannot compute statistics of an empty subset");
  const double n = static_cast<double>(instances.size());

  SubsetStats stats;
  for (const SBInstance& inst : instances)
    for (std::size_t f = 0; f < kNumFeatures; ++f) stats.mean[f] += inst.f[f];
  for (std::size_t f = 0; f < kNumFeatures; ++f) stats.mean[f] /= n;

  for (const SBInstance& inst : instances)
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      double d = inst.f[f] - stats.mean[f];
      stats.stddev[f] += d * d;
    }
  for (std::size_t f = 0; f < kNumFeatures; ++f) stats.stddev[f] = std::sqrt(stats.stddev[f] / n);

  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    stats.avg_means += stats.mean[f];
    stats.avg_stds += stats.stddev[f];
  }
  stats.avg_means /= static_cast<double>(kNumFeatures);
  stats.avg_stds /= static_cast<double>(kNumFeatures);
  return stats;
}

std::string subset_label(std::int64_t duration_seconds) {
  if (duration_seconds == 0) return "all";
  return fmt_days(static_cast<double>(duration_seconds) / kSecondsPerDay) + "d";
}

}  // namespace sbl
