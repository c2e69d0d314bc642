#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sbl {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// One bid event. Durations are always held in seconds; the CSV schema allows
// day-valued durations which are converted at parse time.
struct BidRecord {
  std::string auction_id;
  std::string bidder_id;  // may be empty after parsing; dropped by preprocess
  std::string seller_id;
  double bid_amount = 0.0;
  double bid_time = 0.0;  // seconds since auction start, 0 <= bid_time <= duration
  std::int64_t duration_seconds = 0;
  double start_price = 0.0;
  std::string winner_id;  // empty when the auction had no winner
};

struct AuctionSummary {
  int bid_count = 0;
  std::set<std::string> bidders;
  std::string seller_id;
  double start_price = 0.0;
  std::int64_t duration_seconds = 0;
  std::string winner_id;
};

struct DatasetAggregates {
  double mean_bids_per_auction = 0.0;
  double mean_start_price = 0.0;
};

// Immutable after construction. Records are ordered by
// (auction_id, bid_time, bidder_id); every auction_id present in `records`
// has an entry in `auction_index`.
struct CleanDataset {
  std::vector<BidRecord> records;
  std::map<std::string, AuctionSummary> auction_index;
  DatasetAggregates aggregates;
};

// days * 86400; throws std::invalid_argument for days <= 0.
std::int64_t convert_duration(int days);

// Bid-log CSV header (comma-separated, UTF-8, no quoting):
//   auction_id,bidder_id,seller_id,bid_amount,bid_time,duration,duration_unit,start_price,winner_id
// with duration_unit in {days, seconds}.
extern const char* const kBidCsvHeader;

// Parses and row-validates a bid log. Rows violating per-record invariants
// (negative amounts, bid_time outside [0, duration], unknown unit, bad column
// count) raise DataError naming the row. Rows with an empty bidder_id are
// retained; preprocess() removes them.
std::vector<BidRecord> parse_bids_csv(const std::string& path);

// Cleans a parsed record list:
//  - drops records with an empty bidder_id,
//  - drops exact duplicates of (auction_id, bidder_id, bid_time, bid_amount),
//  - orders records by (auction_id, bid_time, bidder_id), keeping input order
//    for ties,
//  - builds the per-auction index and dataset aggregates.
// Records of one auction must agree on seller, duration, start price and
// winner. A declared winner with no bid in the auction is demoted to
// "no winner". Throws DataError when nothing survives.
CleanDataset preprocess(std::vector<BidRecord> records);

// Writes the schema above with duration in seconds. Numbers use the shortest
// round-trip form, so parse(write(x)) == x exactly.
std::string render_bids_csv(const std::vector<BidRecord>& records);
void write_bids_csv(const std::string& path, const std::vector<BidRecord>& records);

}  // namespace sbl
