#pragma once

#include <cstdint>
#include <map>

#include "sbl/bid_log.hpp"

namespace sbl {

// Synthetic bid-log generator for end-to-end testing. Honest bidders never
// place a bid while already holding the highest bid; planted shill bidders
// enter early, outbid themselves in runs of 2+, go quiet well before the
// auction ends, never win, and stick to one seller's auctions with a token
// starting price, so the downstream labeling stages have real signal.
struct SynthConfig {
  int auctions = 50;
  // days -> relative weight; durations are drawn from this mix per auction.
  std::map<int, double> duration_mix = {{1, 1.0}, {3, 1.0}, {5, 1.0}, {7, 1.0}, {10, 1.0}};
  int bidder_pool = 100;
  double shill_fraction = 0.1;
  double price_min = 50.0;
  double price_max = 1000.0;
  // Honest participants per auction (>= 2) before any shill joins.
  double mean_bidders_per_auction = 6.0;
};

// Deterministic in (config, seed). The result satisfies every CleanDataset
// invariant (it is produced through preprocess()).
CleanDataset generate_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace sbl
