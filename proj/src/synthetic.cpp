#include "sbl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sbl/rng.hpp"

namespace sbl {

namespace {

std::string make_id(char prefix, int width, int value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, value);
  return std::string(buf);
}

void validate(const SynthConfig& c) {
  if (c.auctions <= 0) throw std::invalid_argument("auction count must be positive");
  if (c.duration_mix.empty()) throw std::invalid_argument("duration mix is empty");
  double total = 0.0;
  for (const auto& [days, w] : c.duration_mix) {
    if (days <= 0) throw std::invalid_argument("duration mix contains non-positive day count");
    if (w < 0) throw std::invalid_argument("duration mix weight is negative");
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("duration mix weights sum to zero");
  if (c.shill_fraction < 0 || c.shill_fraction > 1)
    throw std::invalid_argument("shill fraction must be in [0, 1]");
  int shills = static_cast<int>(std::llround(c.shill_fraction * c.bidder_pool));
  if (c.bidder_pool - shills < 2)
    throw std::invalid_argument("bidder pool leaves fewer than 2 honest bidders");
  if (!(c.price_min > 0) || c.price_max < c.price_min)
    throw std::invalid_argument("price range must satisfy 0 < min <= max");
  if (c.mean_bidders_per_auction < 2)
    throw std::invalid_argument("mean bidders per auction must be >= 2");
}

int pick_duration(const std::map<int, double>& mix, double total, Rng& rng) {
  double r = rng.next_double() * total;
  double cum = 0.0;
  int last = mix.rbegin()->first;
  for (const auto& [days, w] : mix) {
    cum += w;
    if (r < cum) return days;
  }
  return last;
}

// Orders `budget[i]` bids per roster slot so that no two consecutive bids
// come from the same slot. Greedy most-remaining-first; requires
// max(budget) <= total - max(budget) + 1.
std::vector<int> arrange_no_adjacent(std::vector<int> budget) {
  int total = std::accumulate(budget.begin(), budget.end(), 0);
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(total));
  int prev = -1;
  for (int step = 0; step < total; ++step) {
    int pick = -1;
    for (std::size_t i = 0; i < budget.size(); ++i) {
      if (static_cast<int>(i) == prev || budget[i] == 0) continue;
      if (pick < 0 || budget[i] > budget[static_cast<std::size_t>(pick)])
        pick = static_cast<int>(i);
    }
    if (pick < 0) throw std::logic_error("bid arrangement infeasible");
    seq.push_back(pick);
    budget[static_cast<std::size_t>(pick)] -= 1;
    prev = pick;
  }
  return seq;
}

}  // namespace

CleanDataset generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
  validate(cfg);

  const int shill_count = static_cast<int>(std::llround(cfg.shill_fraction * cfg.bidder_pool));
  const int normal_count = cfg.bidder_pool - shill_count;
  const int seller_count = std::max(1, cfg.auctions / 2);
  double mix_total = 0.0;
  for (const auto& [days, w] : cfg.duration_mix) mix_total += w;

  // Each shill works one seller's auctions; that is what drives the bidder
  // tendency metric up for them.
  std::vector<std::vector<int>> seller_shills(static_cast<std::size_t>(seller_count));
  {
    Rng rng(derive_seed(seed, 0x5e11e5));
    for (int s = 0; s < shill_count; ++s) {
      int home = static_cast<int>(rng.next_int(static_cast<std::uint64_t>(seller_count)));
      seller_shills[static_cast<std::size_t>(home)].push_back(normal_count + s);
    }
  }

  std::vector<BidRecord> records;
  for (int a = 0; a < cfg.auctions; ++a) {
    Rng rng(derive_seed(seed, 0xa0c7104, static_cast<std::uint64_t>(a)));
    const std::string auction_id = make_id('a', 5, a);

    const int days = pick_duration(cfg.duration_mix, mix_total, rng);
    const std::int64_t duration = convert_duration(days);
    const double T = static_cast<double>(duration);

    const int seller = static_cast<int>(rng.next_int(static_cast<std::uint64_t>(seller_count)));
    const std::string seller_id = make_id('s', 4, seller);
    const auto& local_shills = seller_shills[static_cast<std::size_t>(seller)];
    const bool with_shill = !local_shills.empty() && rng.next_double() < 0.85;
    const int shill =
        with_shill ? local_shills[rng.next_int(local_shills.size())] : -1;

    const double start_price = with_shill
                                   ? cfg.price_min * rng.uniform(0.02, 0.20)
                                   : cfg.price_min +
                                         rng.uniform(0.0, 0.6) * (cfg.price_max - cfg.price_min);

    // Honest roster.
    int m = static_cast<int>(std::llround(
        rng.gauss(cfg.mean_bidders_per_auction, cfg.mean_bidders_per_auction / 3.0)));
    m = std::clamp(m, 2, normal_count);
    std::vector<int> pool(static_cast<std::size_t>(normal_count));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
      std::size_t j = static_cast<std::size_t>(i) +
                      static_cast<std::size_t>(rng.next_int(
                          static_cast<std::uint64_t>(normal_count - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    std::vector<int> roster(pool.begin(), pool.begin() + m);
    std::sort(roster.begin(), roster.end());

    // Bid budgets (1..4 each), padded until the no-adjacent arrangement is
    // feasible.
    std::vector<int> budget(static_cast<std::size_t>(m));
    int total = 0;
    for (auto& b : budget) {
      b = 1 + static_cast<int>(rng.next_int(4));
      total += b;
    }
    while (2 * *std::max_element(budget.begin(), budget.end()) > total + 1) {
      std::size_t arg_max = static_cast<std::size_t>(
          std::max_element(budget.begin(), budget.end()) - budget.begin());
      std::size_t arg_min = static_cast<std::size_t>(
          std::min_element(budget.begin(), budget.end()) - budget.begin());
      if (arg_min == arg_max) arg_min = (arg_max + 1) % budget.size();
      budget[arg_min] += 1;
      total += 1;
    }
    std::vector<int> seq = arrange_no_adjacent(budget);
    const int n = static_cast<int>(seq.size());

    // Honest bid times: ascending, last one close to the end so the final
    // (highest) bid decides the winner.
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int i = 0; i + 1 < n; ++i) times[static_cast<std::size_t>(i)] = rng.uniform(0.04, 0.88);
    std::sort(times.begin(), times.end() - 1);
    times[static_cast<std::size_t>(n - 1)] = rng.uniform(0.90, 0.98);
    for (auto& t : times) t *= T;

    // Event list: (time, bidder index; shill uses pool-wide index).
    struct Event {
      double t;
      int bidder;
    };
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(n) + 5);
    if (with_shill) {
      // Early entry before the first honest bid.
      events.push_back({times[0] * rng.uniform(0.3, 0.7), shill});
    }
    // Self-outbid block goes into the gap after the last honest bid at or
    // before 0.5 T (or right after entry when every honest bid is later).
    int block_after = -1;
    if (with_shill) {
      for (int i = 0; i < n; ++i)
        if (times[static_cast<std::size_t>(i)] <= 0.5 * T) block_after = i;
    }
    const int block_len = with_shill ? 3 + static_cast<int>(rng.next_int(2)) : 0;
    for (int i = 0; i < n; ++i) {
      events.push_back({times[static_cast<std::size_t>(i)], roster[static_cast<std::size_t>(seq[static_cast<std::size_t>(i)])]});
      if (with_shill && i == block_after) {
        double lo = times[static_cast<std::size_t>(i)];
        double hi = std::min(times[static_cast<std::size_t>(i + 1)], 0.6 * T);
        for (int b = 0; b < block_len; ++b)
          events.push_back({lo + (hi - lo) * double(b + 1) / double(block_len + 1), shill});
      }
    }
    if (with_shill && block_after < 0) {
      double lo = events[0].t;
      double hi = std::min(times[0], 0.6 * T);
      for (int b = 0; b < block_len; ++b)
        events.push_back({lo + (hi - lo) * double(b + 1) / double(block_len + 1), shill});
      std::stable_sort(events.begin(), events.end(),
                       [](const Event& x, const Event& y) { return x.t < y.t; });
    }

    // Ascending price ladder; the last event holds the highest bid.
    const std::string winner_id = make_id('b', 5, events.back().bidder);
    double amount = start_price * rng.uniform(1.02, 1.07);
    for (const Event& e : events) {
      BidRecord r;
      r.auction_id = auction_id;
      r.bidder_id = make_id('b', 5, e.bidder);
      r.seller_id = seller_id;
      r.bid_amount = amount;
      r.bid_time = e.t;
      r.duration_seconds = duration;
      r.start_price = start_price;
      r.winner_id = winner_id;
      records.push_back(std::move(r));
      amount *= rng.uniform(1.01, 1.08);
    }
  }

  return preprocess(std::move(records));
}

}  // namespace sbl
