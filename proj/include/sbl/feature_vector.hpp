#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace sbl {

// The eight behavioural metrics, always in this order:
// bidder tendency, bidding ratio, successive outbidding, last bidding,
// early bidding, winning ratio, auction bids, auction starting price.
inline constexpr std::size_t kNumFeatures = 8;

using FeatureVector = std::array<double, kNumFeatures>;

inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "bt", "br", "so", "lb", "eb", "wr", "ab", "asp"};

inline double sq_dist(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(const FeatureVector& a, const FeatureVector& b) {
  return std::sqrt(sq_dist(a, b));
}

}  // namespace sbl
