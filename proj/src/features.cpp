#include "sbl/features.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "sbl/csv.hpp"
#include "sbl/errors.hpp"

namespace sbl {

const char* const kInstanceCsvHeader = "auction_id,bidder_id,bt,br,so,lb,eb,wr,ab,asp";

namespace {

// Per-bidder self-outbid counts for one auction's bid list (time-ascending).
std::map<std::string, int> self_outbid_counts(std::span<const BidRecord> bids) {
  std::map<std::string, int> counts;
  const std::string* holder = nullptr;
  double high = -std::numeric_limits<double>::infinity();
  for (const BidRecord& b : bids) {
    if (holder != nullptr && *holder == b.bidder_id) counts[b.bidder_id] += 1;
    if (b.bid_amount > high) {
      high = b.bid_amount;
      holder = &b.bidder_id;
    }
  }
  return counts;
}

double so_value(int runs) { return runs == 0 ? 0.0 : (runs == 1 ? 0.5 : 1.0); }

}  // namespace

int successive_outbid_runs(std::span<const BidRecord> bids, const std::string& bidder_id) {
  auto counts = self_outbid_counts(bids);
  auto it = counts.find(bidder_id);
  return it == counts.end() ? 0 : it->second;
}

InstanceSet compute_instances(const CleanDataset& dataset) {
  // Bidder-history pre-pass: participation, wins, per-seller auction counts.
  std::map<std::string, int> participations;
  std::map<std::string, int> wins;
  std::map<std::string, std::map<std::string, int>> seller_counts;
  for (const auto& [auction_id, s] : dataset.auction_index) {
    for (const std::string& b : s.bidders) {
      participations[b] += 1;
      seller_counts[b][s.seller_id] += 1;
      if (s.winner_id == b) wins[b] += 1;
    }
  }

  const double mean_bids = dataset.aggregates.mean_bids_per_auction;
  const double mean_start = dataset.aggregates.mean_start_price;

  InstanceSet out;
  // Records are sorted by auction id, so each auction is one contiguous slice.
  std::size_t pos = 0;
  for (const auto& [auction_id, summary] : dataset.auction_index) {
    if (summary.bid_count == 0) {
      out.skipped_auctions += 1;
      continue;
    }
    std::size_t begin = pos;
    while (pos < dataset.records.size() && dataset.records[pos].auction_id == auction_id) ++pos;
    std::span<const BidRecord> bids(dataset.records.data() + begin, pos - begin);

    struct PerBidder {
      int bid_count = 0;
      double first_time = 0.0;
      double last_time = 0.0;
    };
    std::map<std::string, PerBidder> per;
    for (const BidRecord& b : bids) {
      auto [it, inserted] = per.try_emplace(b.bidder_id);
      PerBidder& p = it->second;
      if (inserted) p.first_time = b.bid_time;
      p.last_time = b.bid_time;
      p.bid_count += 1;
    }
    const auto runs = self_outbid_counts(bids);
    const double total_bids = static_cast<double>(bids.size());
    const double duration = static_cast<double>(summary.duration_seconds);
    const double ab = std::max(0.0, 1.0 - mean_bids / total_bids);
    const double asp =
        mean_start > 0 ? std::max(0.0, 1.0 - summary.start_price / mean_start) : 0.0;

    for (const auto& [bidder_id, p] : per) {
      const auto& by_seller = seller_counts[bidder_id];
      int max_seller = 0;
      for (const auto& [seller, n] : by_seller) max_seller = std::max(max_seller, n);
      const int entered = participations[bidder_id];

      SBInstance inst;
      inst.auction_id = auction_id;
      inst.bidder_id = bidder_id;
      inst.f[0] = static_cast<double>(max_seller) / static_cast<double>(entered);
      inst.f[1] = static_cast<double>(p.bid_count) / total_bids;
      auto rit = runs.find(bidder_id);
      inst.f[2] = so_value(rit == runs.end() ? 0 : rit->second);
      inst.f[3] = p.last_time / duration;
      inst.f[4] = p.first_time / duration;
      inst.f[5] = 1.0 - static_cast<double>(wins[bidder_id]) / static_cast<double>(entered);
      inst.f[6] = ab;
      inst.f[7] = asp;
      out.instances.push_back(std::move(inst));
    }
  }
  // auction_index and per-bidder maps iterate in key order, so instances are
  // already sorted by (auction_id, bidder_id).
  return out;
}

void validate_instance(const SBInstance& inst, const std::string& context) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!(inst.f[i] >= 0.0 && inst.f[i] <= 1.0))
      throw DataError(context + ": feature " + kFeatureNames[i] + " = " +
                      fmt_shortest(inst.f[i]) + " outside [0, 1]");
  }
  if (inst.f[2] != 0.0 && inst.f[2] != 0.5 && inst.f[2] != 1.0)
    throw DataError(context + ": so must be one of {0, 0.5, 1}, got " + fmt_shortest(inst.f[2]));
  if (inst.f[4] > inst.f[3])
    throw DataError(context + ": eb " + fmt_shortest(inst.f[4]) + " exceeds lb " +
                    fmt_shortest(inst.f[3]));
}

namespace {

void append_instance_row(std::string& out, const SBInstance& inst) {
  out += inst.auction_id;
  out += ',';
  out += inst.bidder_id;
  for (double v : inst.f) {
    out += ',';
    out += fmt_fixed(v, 6);
  }
}

}  // namespace

std::string render_instances_csv(std::span<const SBInstance> instances) {
  std::string out(kInstanceCsvHeader);
  out += '\n';
  for (const SBInstance& inst : instances) {
    append_instance_row(out, inst);
    out += '\n';
  }
  return out;
}

std::string render_instances_csv(std::span<const SBInstance> instances,
                                 std::span<const double> duration_days) {
  std::string out(kInstanceCsvHeader);
  out += ",duration_days\n";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    append_instance_row(out, instances[i]);
    out += ',';
    out += fmt_days(duration_days[i]);
    out += '\n';
  }
  return out;
}

void write_instances_csv(const std::string& path, std::span<const SBInstance> instances) {
  write_file(path, render_instances_csv(instances));
}

LoadedInstances read_instances_csv(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty())
    throw DataError(path + ": missing header; expected '" + std::string(kInstanceCsvHeader) + "'");

  const std::string base(kInstanceCsvHeader);
  bool with_days = false;
  bool with_labels = false;
  if (lines[0] == base) {
    // plain instance file
  } else if (lines[0] == base + ",duration_days") {
    with_days = true;
  } else if (lines[0] == base + ",duration_days,cluster_id,label") {
    with_days = true;
    with_labels = true;
  } else {
    throw DataError(path + ": unrecognized header '" + lines[0] + "'");
  }
  const std::size_t expected_cols = 10 + (with_days ? 1 : 0) + (with_labels ? 2 : 0);

  LoadedInstances out;
  out.has_durations = with_days;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path + " row " + std::to_string(i + 1);
    std::vector<std::string> cols = split_csv_line(lines[i]);
    if (cols.size() != expected_cols)
      throw DataError(where + ": expected " + std::to_string(expected_cols) + " columns, got " +
                      std::to_string(cols.size()));
    SBInstance inst;
    inst.auction_id = cols[0];
    inst.bidder_id = cols[1];
    if (inst.auction_id.empty() || inst.bidder_id.empty())
      throw DataError(where + ": empty auction_id or bidder_id");
    for (std::size_t f = 0; f < kNumFeatures; ++f)
      inst.f[f] = parse_double(cols[2 + f], where + " " + kFeatureNames[f]);
    validate_instance(inst, where);
    if (with_days) out.duration_days.push_back(parse_double(cols[10], where + " duration_days"));
    out.instances.push_back(std::move(inst));
  }
  return out;
}

}  // namespace sbl
