#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbl/bid_log.hpp"
#include "sbl/feature_vector.hpp"

namespace sbl {

// One (auction, bidder) pair with its eight metrics, each in [0, 1].
struct SBInstance {
  std::string auction_id;
  std::string bidder_id;
  FeatureVector f{};
};

struct InstanceSet {
  std::vector<SBInstance> instances;  // ordered by (auction_id, bidder_id)
  int skipped_auctions = 0;           // indexed auctions that held no bids
};

// Counts the bids `bidder_id` placed while already holding the highest bid
// so far. `bids` must be sorted by bid_time ascending; on amount ties the
// earlier bid keeps the lead.
int successive_outbid_runs(std::span<const BidRecord> bids, const std::string& bidder_id);

// Metric definitions, per (auction a, bidder b):
//   bt  = (a-count with b's most-frequented seller) / (auctions b entered)
//   br  = (bids by b in a) / (total bids in a)
//   so  = 0 / 0.5 / 1 for 0 / 1 / >=2 successive self-outbids in a
//   lb  = time of b's last bid in a / duration
//   eb  = time of b's first bid in a / duration
//   wr  = 1 - (auctions b won) / (auctions b entered)
//   ab  = max(0, 1 - mean bids per auction / bids in a)
//   asp = max(0, 1 - start price of a / mean start price)
// All eight land in [0, 1]; br sums to 1 within each auction; eb <= lb.
InstanceSet compute_instances(const CleanDataset& dataset);

// Checks the SBInstance invariants (range, so domain, eb <= lb).
void validate_instance(const SBInstance& inst, const std::string& context);

// Instance CSV: features printed with 6 decimals.
//   auction_id,bidder_id,bt,br,so,lb,eb,wr,ab,asp
// An optional trailing duration_days column (plus ignored cluster_id,label
// columns) is accepted on input so labeled output files can be fed back in.
extern const char* const kInstanceCsvHeader;

std::string render_instances_csv(std::span<const SBInstance> instances);
std::string render_instances_csv(std::span<const SBInstance> instances,
                                 std::span<const double> duration_days);
void write_instances_csv(const std::string& path, std::span<const SBInstance> instances);

struct LoadedInstances {
  std::vector<SBInstance> instances;
  std::vector<double> duration_days;  // parallel to instances when present
  bool has_durations = false;
};

LoadedInstances read_instances_csv(const std::string& path);

}  // namespace sbl
