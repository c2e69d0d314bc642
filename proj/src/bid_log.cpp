#include "sbl/bid_log.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "sbl/csv.hpp"
#include "sbl/errors.hpp"

namespace sbl {

const char* const kBidCsvHeader =
    "auction_id,bidder_id,seller_id,bid_amount,bid_time,duration,duration_unit,"
    "start_price,winner_id";

std::int64_t convert_duration(int days) {
  if (days <= 0) throw std::invalid_argument("duration must be a positive number of days");
  return static_cast<std::int64_t>(days) * kSecondsPerDay;
}

std::vector<BidRecord> parse_bids_csv(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw DataError(path + ": missing header; expected '" +
                                     std::string(kBidCsvHeader) + "'");
  if (lines[0] != kBidCsvHeader)
    throw DataError(path + ": unrecognized header '" + lines[0] + "'; expected '" +
                    std::string(kBidCsvHeader) + "'");

  std::vector<BidRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path + " row " + std::to_string(i + 1);
    std::vector<std::string> cols = split_csv_line(lines[i]);
    if (cols.size() != 9)
      throw DataError(where + ": expected 9 columns, got " + std::to_string(cols.size()));

    BidRecord r;
    r.auction_id = cols[0];
    r.bidder_id = cols[1];
    r.seller_id = cols[2];
    r.bid_amount = parse_double(cols[3], where + " bid_amount");
    r.bid_time = parse_double(cols[4], where + " bid_time");
    double duration = parse_double(cols[5], where + " duration");
    const std::string& unit = cols[6];
    r.start_price = parse_double(cols[7], where + " start_price");
    r.winner_id = cols[8];

    if (r.auction_id.empty()) throw DataError(where + ": empty auction_id");
    if (r.bid_amount < 0) throw DataError(where + ": negative bid_amount");
    if (r.start_price < 0) throw DataError(where + ": negative start_price");
    if (duration <= 0) throw DataError(where + ": duration must be positive");
    if (unit == "days") {
      r.duration_seconds = static_cast<std::int64_t>(std::llround(duration * kSecondsPerDay));
    } else if (unit == "seconds") {
      r.duration_seconds = static_cast<std::int64_t>(std::llround(duration));
    } else {
      throw DataError(where + ": duration_unit must be 'days' or 'seconds', got '" + unit + "'");
    }
    if (r.bid_time < 0) throw DataError(where + ": negative bid_time");
    if (r.bid_time > static_cast<double>(r.duration_seconds))
      throw DataError(where + ": bid_time " + fmt_shortest(r.bid_time) +
                      " exceeds auction duration " + std::to_string(r.duration_seconds));
    records.push_back(std::move(r));
  }
  return records;
}

CleanDataset preprocess(std::vector<BidRecord> records) {
  // Drop missing bidder ids, then exact duplicates (first occurrence wins).
  std::vector<BidRecord> kept;
  kept.reserve(records.size());
  std::set<std::tuple<std::string, std::string, double, double>> seen;
  for (auto& r : records) {
    if (r.bidder_id.empty()) continue;
    if (!seen.insert({r.auction_id, r.bidder_id, r.bid_time, r.bid_amount}).second) continue;
    kept.push_back(std::move(r));
  }
  if (kept.empty()) throw DataError("no records survived preprocessing");

  std::stable_sort(kept.begin(), kept.end(), [](const BidRecord& a, const BidRecord& b) {
    if (a.auction_id != b.auction_id) return a.auction_id < b.auction_id;
    if (a.bid_time != b.bid_time) return a.bid_time < b.bid_time;
    return a.bidder_id < b.bidder_id;
  });

  CleanDataset ds;
  for (const auto& r : kept) {
    auto [it, inserted] = ds.auction_index.try_emplace(r.auction_id);
    AuctionSummary& s = it->second;
    if (inserted) {
      s.seller_id = r.seller_id;
      s.start_price = r.start_price;
      s.duration_seconds = r.duration_seconds;
      s.winner_id = r.winner_id;
    } else {
      if (s.seller_id != r.seller_id || s.duration_seconds != r.duration_seconds ||
          s.start_price != r.start_price || s.winner_id != r.winner_id)
        throw DataError("auction " + r.auction_id +
                        " has inconsistent seller/duration/start_price/winner across records");
    }
    s.bid_count += 1;
    s.bidders.insert(r.bidder_id);
  }

  // A winner that never bid in its auction cannot be scored; treat as no winner.
  for (auto& [id, s] : ds.auction_index) {
    if (!s.winner_id.empty() && s.bidders.count(s.winner_id) == 0) {
      for (auto& r : kept)
        if (r.auction_id == id) r.winner_id.clear();
      s.winner_id.clear();
    }
  }

  ds.records = std::move(kept);
  double total_start = 0.0;
  for (const auto& [id, s] : ds.auction_index) total_start += s.start_price;
  ds.aggregates.mean_bids_per_auction =
      static_cast<double>(ds.records.size()) / static_cast<double>(ds.auction_index.size());
  ds.aggregates.mean_start_price = total_start / static_cast<double>(ds.auction_index.size());
  return ds;
}

std::string render_bids_csv(const std::vector<BidRecord>& records) {
  std::string out(kBidCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.auction_id;
    out += ',';
    out += r.bidder_id;
    out += ',';
    out += r.seller_id;
    out += ',';
    out += fmt_shortest(r.bid_amount);
    out += ',';
    out += fmt_shortest(r.bid_time);
    out += ',';
    out += std::to_string(r.duration_seconds);
    out += ",seconds,";
    out += fmt_shortest(r.start_price);
    out += ',';
    out += r.winner_id;
    out += '\n';
  }
  return out;
}

void write_bids_csv(const std::string& path, const std::vector<BidRecord>& records) {
  write_file(path, render_bids_csv(records));
}

}  // namespace sbl
