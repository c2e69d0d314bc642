#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sbl/features.hpp"

namespace sbl {

// Instances grouped by their auction's bidding duration. A duration of 0
// marks the catch-all subset used when the input carries no durations.
struct Subset {
  std::int64_t duration_seconds = 0;
  double duration_days = 0.0;
  std::vector<SBInstance> instances;
};

// Per-feature mean and population standard deviation, plus their row
// averages, which feed the labeling decision line.
struct SubsetStats {
  FeatureVector mean{};
  FeatureVector stddev{};
  double avg_means = 0.0;
  double avg_stds = 0.0;
};

// Groups by the duration recorded in the dataset's auction index. Subsets are
// disjoint and cover the input; durations with no instances do not appear.
// An instance referencing an unknown auction raises DataError.
std::map<std::int64_t, Subset> partition_by_duration(const std::vector<SBInstance>& instances,
                                                     const CleanDataset& dataset);

// Same grouping driven by an explicit per-instance day count (as read from an
// instance CSV). Day values are snapped to whole seconds.
std::map<std::int64_t, Subset> partition_by_days(const std::vector<SBInstance>& instances,
                                                 const std::vector<double>& days);

// Population statistics (divide by N). Throws std::invalid_argument on an
// empty instance list.
SubsetStats compute_stats(const std::vector<SBInstance>& instances);

// "7d", "2.5d", or "all" for the duration-less subset. Used for directory and
// report column names.
std::string subset_label(std::int64_t duration_seconds);

}  // namespace sbl
