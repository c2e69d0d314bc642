#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "sbl/bid_log.hpp"
#include "sbl/csv.hpp"
#include "sbl/errors.hpp"
#include "sbl/synthetic.hpp"

using namespace sbl;

namespace {

const char* kHeader =
    "auction_id,bidder_id,seller_id,bid_amount,bid_time,duration,duration_unit,start_price,"
    "winner_id\n";

std::string fixture(const std::string& rows) { return std::string(kHeader) + rows; }

std::string write_fixture(const std::string& name, const std::string& content) {
  std::string dir = oracle::test_dir(name);
  std::string path = dir + "/bids.csv";
  write_file(path, content);
  return path;
}

}  // namespace

TEST_CASE("convert_duration maps days to seconds") {
  CHECK(convert_duration(1) == 86400);
  CHECK(convert_duration(10) == 864000);
  CHECK(convert_duration(7) == 604800);
  CHECK_THROWS_AS(convert_duration(0), std::invalid_argument);
  CHECK_THROWS_AS(convert_duration(-3), std::invalid_argument);
}

TEST_CASE("parse_bids_csv reads well-formed rows") {
  auto path = write_fixture("parse_ok",
                            fixture("a1,b1,s1,100.5,10,1,days,50,b2\n"
                                    "a1,b2,s1,120,3600,1,days,50,b2\n"
                                    "a2,b1,s2,200,86000,86400,seconds,60,b1\n"));
  auto records = parse_bids_csv(path);
  REQUIRE(records.size() == 3);
  CHECK(records[0].auction_id == "a1");
  CHECK(records[0].bid_amount == doctest::Approx(100.5));
  CHECK(records[0].duration_seconds == 86400);
  CHECK(records[2].duration_seconds == 86400);
  CHECK(records[2].winner_id == "b1");
}

TEST_CASE("parse_bids_csv keeps empty bidder ids for preprocess to drop") {
  auto path = write_fixture("parse_empty_bidder",
                            fixture("a1,,s1,100,10,1,days,50,\n"
                                    "a1,b2,s1,120,20,1,days,50,\n"));
  auto records = parse_bids_csv(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].bidder_id.empty());

  auto ds = preprocess(records);
  CHECK(ds.records.size() == 1);
  CHECK(ds.records[0].bidder_id == "b2");
}

TEST_CASE("parse_bids_csv rejects bid_time beyond the duration, naming the row") {
  auto path = write_fixture("parse_late_bid",
                            fixture("a1,b1,s1,100,10,1,days,50,\n"
                                    "a1,b2,s1,120,90000,1,days,50,\n"));
  CHECK_THROWS_WITH_AS(parse_bids_csv(path), doctest::Contains("row 3"), DataError);
}

TEST_CASE("parse_bids_csv validates the header and column counts") {
  auto bad_header = write_fixture("parse_bad_header", "auction,bidder\na1,b1\n");
  CHECK_THROWS_AS(parse_bids_csv(bad_header), DataError);

  auto bad_row = write_fixture("parse_bad_row", fixture("a1,b1,s1,100,10\n"));
  CHECK_THROWS_WITH_AS(parse_bids_csv(bad_row), doctest::Contains("row 2"), DataError);

  auto bad_unit = write_fixture("parse_bad_unit", fixture("a1,b1,s1,100,10,1,weeks,50,\n"));
  CHECK_THROWS_AS(parse_bids_csv(bad_unit), DataError);
}

TEST_CASE("preprocess drops exact duplicates") {
  std::vector<BidRecord> records;
  BidRecord r;
  r.auction_id = "a1";
  r.bidder_id = "b1";
  r.seller_id = "s1";
  r.bid_amount = 100;
  r.bid_time = 10;
  r.duration_seconds = 86400;
  r.start_price = 50;
  records.push_back(r);
  records.push_back(r);  // exact duplicate
  r.bidder_id = "b2";
  r.bid_time = 20;
  records.push_back(r);

  auto ds = preprocess(records);
  CHECK(ds.records.size() == 2);
  CHECK(ds.auction_index.at("a1").bid_count == 2);
}

TEST_CASE("preprocess computes dataset aggregates") {
  std::vector<BidRecord> records;
  auto add = [&](const std::string& auction, const std::string& bidder, double t) {
    BidRecord r;
    r.auction_id = auction;
    r.bidder_id = bidder;
    r.seller_id = "s1";
    r.bid_amount = 100 + t;
    r.bid_time = t;
    r.duration_seconds = 86400;
    r.start_price = 40;
    records.push_back(r);
  };
  for (int i = 0; i < 3; ++i) add("a1", "b" + std::to_string(i), 10 + i);
  for (int i = 0; i < 5; ++i) add("a2", "b" + std::to_string(i), 10 + i);

  auto ds = preprocess(records);
  CHECK(ds.aggregates.mean_bids_per_auction == doctest::Approx(4.0));
  CHECK(ds.aggregates.mean_start_price == doctest::Approx(40.0));
}

TEST_CASE("preprocess fails on an empty survivor set") {
  std::vector<BidRecord> records;
  BidRecord r;
  r.auction_id = "a1";
  r.bid_time = 1;
  r.duration_seconds = 86400;
  records.push_back(r);  // empty bidder_id, dropped
  CHECK_THROWS_AS(preprocess(records), DataError);
  CHECK_THROWS_AS(preprocess({}), DataError);
}

TEST_CASE("preprocess demotes a winner that never bid") {
  std::vector<BidRecord> records;
  BidRecord r;
  r.auction_id = "a1";
  r.bidder_id = "b1";
  r.seller_id = "s1";
  r.bid_amount = 10;
  r.bid_time = 5;
  r.duration_seconds = 86400;
  r.winner_id = "ghost";
  records.push_back(r);
  auto ds = preprocess(records);
  CHECK(ds.auction_index.at("a1").winner_id.empty());
  CHECK(ds.records[0].winner_id.empty());
}

TEST_CASE("preprocess rejects inconsistent auction metadata") {
  std::vector<BidRecord> records;
  BidRecord r;
  r.auction_id = "a1";
  r.bidder_id = "b1";
  r.seller_id = "s1";
  r.bid_amount = 10;
  r.bid_time = 5;
  r.duration_seconds = 86400;
  records.push_back(r);
  r.bidder_id = "b2";
  r.bid_time = 6;
  r.duration_seconds = 172800;  // disagrees
  records.push_back(r);
  CHECK_THROWS_AS(preprocess(records), DataError);
}

TEST_CASE("preprocess is idempotent and never grows the record count") {
  SynthConfig cfg;
  cfg.auctions = 12;
  cfg.bidder_pool = 30;
  auto ds = generate_synthetic(cfg, 7);
  auto again = preprocess(ds.records);
  CHECK(render_bids_csv(again.records) == render_bids_csv(ds.records));
  CHECK(again.records.size() <= ds.records.size());
}

TEST_CASE("synthetic generation is deterministic") {
  SynthConfig cfg;
  cfg.auctions = 10;
  cfg.bidder_pool = 25;
  auto a = generate_synthetic(cfg, 1);
  auto b = generate_synthetic(cfg, 1);
  CHECK(render_bids_csv(a.records) == render_bids_csv(b.records));
  auto c = generate_synthetic(cfg, 2);
  CHECK(render_bids_csv(a.records) != render_bids_csv(c.records));
}

TEST_CASE("synthetic duration mix is honoured") {
  SynthConfig cfg;
  cfg.auctions = 10;
  cfg.bidder_pool = 20;
  cfg.duration_mix = {{1, 1.0}};
  auto ds = generate_synthetic(cfg, 3);
  for (const auto& r : ds.records) CHECK(r.duration_seconds == 86400);
}

TEST_CASE("zero shill fraction yields no self-outbid runs") {
  SynthConfig cfg;
  cfg.auctions = 25;
  cfg.bidder_pool = 40;
  cfg.shill_fraction = 0.0;
  auto ds = generate_synthetic(cfg, 11);

  // Independent scan, one auction at a time.
  std::map<std::string, std::vector<std::pair<std::string, double>>> per_auction;
  for (const auto& r : ds.records) per_auction[r.auction_id].push_back({r.bidder_id, r.bid_amount});
  for (const auto& [auction, bids] : per_auction)
    for (const auto& [bidder, runs] : oracle::outbid_runs(bids)) CHECK(runs < 2);
}

TEST_CASE("synthetic winners always appear among their auction's bidders") {
  SynthConfig cfg;
  cfg.auctions = 15;
  cfg.bidder_pool = 30;
  auto ds = generate_synthetic(cfg, 5);
  for (const auto& [id, s] : ds.auction_index) {
    REQUIRE(!s.winner_id.empty());
    CHECK(s.bidders.count(s.winner_id) == 1);
  }
}

TEST_CASE("synthetic rejects bad configs") {
  SynthConfig cfg;
  cfg.auctions = 0;
  CHECK_THROWS_AS(generate_synthetic(cfg, 1), std::invalid_argument);
  cfg.auctions = 5;
  cfg.shill_fraction = 1.0;  // no honest bidders left
  CHECK_THROWS_AS(generate_synthetic(cfg, 1), std::invalid_argument);
}

TEST_CASE("bid CSV round-trips exactly") {
  SynthConfig cfg;
  cfg.auctions = 8;
  cfg.bidder_pool = 20;
  auto ds = generate_synthetic(cfg, 9);
  std::string dir = oracle::test_dir("bid_roundtrip");
  write_bids_csv(dir + "/bids.csv", ds.records);
  auto parsed = parse_bids_csv(dir + "/bids.csv");
  CHECK(render_bids_csv(parsed) == render_bids_csv(ds.records));
}
