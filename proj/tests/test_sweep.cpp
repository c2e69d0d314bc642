#include <doctest.h>

#include "oracles.hpp"
#include "sbl/errors.hpp"
#include "sbl/rng.hpp"
#include "sbl/sweep.hpp"

using namespace sbl;

TEST_CASE("criterion prefers the balanced distribution") {
  auto balanced = sweep_score({8, 8, 8, 8}, 5);
  auto lopsided = sweep_score({29, 1, 1, 1}, 5);
  CHECK(balanced.first == 4);
  CHECK(lopsided.first == 1);
  CHECK(balanced > lopsided);
}

TEST_CASE("entropy breaks ties between equal non-trivial counts") {
  auto even = sweep_score({10, 10, 10, 10}, 5);
  auto skew = sweep_score({37, 1, 1, 1}, 5);
  CHECK(even.first == skew.first + 3);
  auto skew_a = sweep_score({20, 20, 5, 5}, 5);
  auto skew_b = sweep_score({40, 6, 2, 2}, 5);
  CHECK(skew_a.first == 4);
  CHECK(skew_b.first == 2);
  CHECK(skew_a > skew_b);
}

TEST_CASE("criterion is permutation-invariant") {
  auto a = sweep_score({3, 14, 1, 5, 9}, 5);
  auto b = sweep_score({9, 5, 3, 1, 14}, 5);
  CHECK(a.first == b.first);
  CHECK(a.second == doctest::Approx(b.second).epsilon(1e-12));
}

TEST_CASE("a one-cell grid is chosen") {
  std::vector<int> truth;
  auto pts = oracle::gaussian_blobs({oracle::pt({0, 0}), oracle::pt({1, 1})}, 15, 0.02, 5, &truth);
  SweepGrid grid;
  grid.rp_values = {5};
  grid.alpha_values = {0.1};
  auto result = sweep_params(pts, 2, grid, 42);
  REQUIRE(result.report.size() == 1);
  CHECK(result.report[0].chosen);
  CHECK(result.rp == 5);
  CHECK(result.alpha == doctest::Approx(0.1));
  CHECK(result.clusters.size() == 2);
}

TEST_CASE("the grid report has one row of k sizes per cell") {
  std::vector<int> truth;
  auto pts = oracle::gaussian_blobs(
      {oracle::pt({0, 0}), oracle::pt({1, 1}), oracle::pt({0, 1})}, 12, 0.02, 6, &truth);
  SweepGrid grid;  // default 2 x 4
  auto result = sweep_params(pts, 3, grid, 17);
  REQUIRE(result.report.size() == 8);
  int chosen = 0;
  for (const auto& cell : result.report) {
    CHECK(cell.ok);
    CHECK(cell.sizes.size() == 3);
    int total = 0;
    for (int s : cell.sizes) total += s;
    CHECK(total == static_cast<int>(pts.size()));
    if (cell.chosen) chosen += 1;
  }
  CHECK(chosen == 1);

  // Grid order: rp-major, alpha-minor.
  CHECK(result.report[0].rp == 5);
  CHECK(result.report[0].alpha == doctest::Approx(0.1));
  CHECK(result.report[4].rp == 10);
}

TEST_CASE("sweep is deterministic in the seed") {
  std::vector<int> truth;
  auto pts = oracle::gaussian_blobs({oracle::pt({0, 0}), oracle::pt({2, 2})}, 20, 0.05, 7, &truth);
  auto a = sweep_params(pts, 2, SweepGrid{}, 1001, {}, 2);
  auto b = sweep_params(pts, 2, SweepGrid{}, 1001, {}, 1);
  CHECK(a.rp == b.rp);
  CHECK(a.alpha == doctest::Approx(b.alpha));
  REQUIRE(a.report.size() == b.report.size());
  for (std::size_t i = 0; i < a.report.size(); ++i) CHECK(a.report[i].sizes == b.report[i].sizes);
}

TEST_CASE("an all-failing grid raises a data error") {
  std::vector<int> truth;
  auto pts = oracle::gaussian_blobs({oracle::pt({0, 0})}, 5, 0.02, 8, &truth);
  CureParams base;
  base.outlier_min_size = -1;  // every cell rejects it
  CHECK_THROWS_AS(sweep_params(pts, 2, SweepGrid{}, 3, base), DataError);
}

TEST_CASE("grid validation") {
  std::vector<FeatureVector> pts = {oracle::pt({0}), oracle::pt({1})};
  SweepGrid bad;
  bad.rp_values = {};
  CHECK_THROWS_AS(sweep_params(pts, 1, bad, 1), std::invalid_argument);
  bad = SweepGrid{};
  bad.alpha_values = {1.5};
  CHECK_THROWS_AS(sweep_params(pts, 1, bad, 1), std::invalid_argument);
}
