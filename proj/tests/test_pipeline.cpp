#include <doctest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "sbl/csv.hpp"
#include "sbl/errors.hpp"
#include "sbl/pipeline.hpp"

using namespace sbl;

namespace {

// 20 one-day instances in the plain instance layout.
std::string small_instance_file(const std::string& dir) {
  Rng rng(808);
  std::vector<SBInstance> instances;
  std::vector<double> days;
  for (int i = 0; i < 20; ++i) {
    SBInstance inst;
    inst.auction_id = "a" + std::to_string(i / 4);
    inst.bidder_id = "b" + std::to_string(i);
    double base = i < 5 ? 0.7 : 0.2;
    for (auto& v : inst.f) v = std::min(1.0, std::max(0.0, base + rng.gauss(0, 0.05)));
    inst.f[2] = i < 5 ? 1.0 : 0.0;  // keep so in its domain
    inst.f[4] = std::min(inst.f[4], inst.f[3]);
    instances.push_back(inst);
    days.push_back(1.0);
  }
  std::string path = dir + "/instances.csv";
  write_file(path, render_instances_csv(instances, days));
  return path;
}

PipelineConfig instance_config(const std::string& input, const std::string& out_dir) {
  PipelineConfig cfg;
  cfg.input = input;
  cfg.kind = InputKind::instances;
  cfg.output_dir = out_dir;
  cfg.seed = 42;
  cfg.k_max = 6;
  return cfg;
}

}  // namespace

TEST_CASE("smoke run on a precomputed one-subset instance file") {
  std::string dir = oracle::test_dir("pipe_smoke");
  std::string input = small_instance_file(dir);
  auto cfg = instance_config(input, dir + "/out");
  RunResult r = run_all(cfg);

  CHECK(r.labeled.rows.size() == 20);
  REQUIRE(r.labeled.summary.size() == 1);
  CHECK(r.labeled.summary[0].partition == "1d");
  CHECK(r.labeled.summary[0].normal + r.labeled.summary[0].suspicious == 20);

  for (const char* f : {"instances.csv", "labeled.csv", "summary.csv",
                        "subsets/1d/instances.csv", "subsets/1d/stats.csv",
                        "subsets/1d/silhouette.csv", "subsets/1d/best_k.csv",
                        "subsets/1d/sweep.csv", "subsets/1d/assignments.csv",
                        "subsets/1d/clusters.csv", "reports/stats_table.csv",
                        "reports/silhouette_curves.csv", "reports/sweep_tables.csv",
                        "reports/summary_table.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) / f));
}

TEST_CASE("instance input without durations forms a single catch-all subset") {
  std::string dir = oracle::test_dir("pipe_all_subset");
  std::string with_days = small_instance_file(dir);
  // Rewrite without the duration column.
  auto loaded = read_instances_csv(with_days);
  std::string input = dir + "/plain.csv";
  write_file(input, render_instances_csv(loaded.instances));

  auto cfg = instance_config(input, dir + "/out");
  RunResult r = run_all(cfg);
  REQUIRE(r.labeled.summary.size() == 1);
  CHECK(r.labeled.summary[0].partition == "all");
  CHECK(r.labeled.rows.size() == 20);
  CHECK(std::filesystem::exists(dir + "/out/subsets/all/instances.csv"));

  // The catch-all file round-trips through the pipeline.
  auto cfg2 = instance_config(dir + "/out/subsets/all/instances.csv", dir + "/out2");
  RunResult r2 = run_all(cfg2);
  CHECK(r2.labeled.summary[0].partition == "all");
}

TEST_CASE("a subset with one distinct point degenerates to a single cluster") {
  std::string dir = oracle::test_dir("pipe_degenerate");
  std::vector<SBInstance> instances;
  std::vector<double> days;
  for (int i = 0; i < 3; ++i) {
    SBInstance inst;
    inst.auction_id = "a1";
    inst.bidder_id = "b" + std::to_string(i);
    inst.f.fill(0.25);
    inst.f[2] = 0.0;  // so must stay in its domain
    instances.push_back(inst);
    days.push_back(1.0);
  }
  std::string input = dir + "/instances.csv";
  write_file(input, render_instances_csv(instances, days));

  auto cfg = instance_config(input, dir + "/out");
  RunResult r = run_all(cfg);
  REQUIRE(r.subsets.size() == 1);
  CHECK(r.subsets[0].chosen_k == 1);
  CHECK(r.subsets[0].ksweep.scores.empty());
  CHECK(r.labeled.summary[0].clusters == 1);
  CHECK(r.labeled.summary[0].instances == 3);
  // Silhouette artifact exists but carries no curve rows.
  auto lines = read_lines(dir + "/out/subsets/1d/silhouette.csv");
  CHECK(lines.size() == 1);
}

TEST_CASE("two runs produce byte-identical output trees and leave the input alone") {
  std::string dir = oracle::test_dir("pipe_determinism");
  std::string input = small_instance_file(dir);
  std::string before = oracle::slurp(input);

  run_all(instance_config(input, dir + "/out1"));
  run_all(instance_config(input, dir + "/out2"));
  CHECK(oracle::same_tree(dir + "/out1", dir + "/out2"));
  CHECK(oracle::slurp(input) == before);

  // The worker count must not influence results.
  auto cfg1 = instance_config(input, dir + "/out_t1");
  cfg1.threads = 1;
  run_all(cfg1);
  auto cfg4 = instance_config(input, dir + "/out_t4");
  cfg4.threads = 4;
  run_all(cfg4);
  CHECK(oracle::same_tree(dir + "/out_t1", dir + "/out_t4"));
}

TEST_CASE("labeled output recounts to the summary (independent reader)") {
  std::string dir = oracle::test_dir("pipe_recount");
  std::string input = small_instance_file(dir);
  auto cfg = instance_config(input, dir + "/out");
  run_all(cfg);

  auto labeled = read_lines(cfg.output_dir + "/labeled.csv");
  std::map<std::string, std::pair<int, int>> counts;  // subset -> (normal, suspicious)
  for (std::size_t i = 1; i < labeled.size(); ++i) {
    if (labeled[i].empty()) continue;
    auto cols = split_csv_line(labeled[i]);
    REQUIRE(cols.size() == 13);
    std::string subset = cols[10] + "d";
    if (cols[12] == "1")
      counts[subset].second += 1;
    else
      counts[subset].first += 1;
  }

  auto summary = read_lines(cfg.output_dir + "/summary.csv");
  int rows_checked = 0;
  for (std::size_t i = 1; i < summary.size(); ++i) {
    if (summary[i].empty()) continue;
    auto cols = split_csv_line(summary[i]);
    if (cols[0] == "total") continue;
    REQUIRE(counts.count(cols[0]) == 1);
    CHECK(counts[cols[0]].first == std::stoi(cols[6]));
    CHECK(counts[cols[0]].second == std::stoi(cols[7]));
    rows_checked += 1;
  }
  CHECK(rows_checked == 1);
}

TEST_CASE("the labeled CSV feeds back through the pipeline") {
  std::string dir = oracle::test_dir("pipe_roundtrip");
  std::string input = small_instance_file(dir);
  auto cfg = instance_config(input, dir + "/out");
  RunResult first = run_all(cfg);

  auto cfg2 = instance_config(cfg.output_dir + "/labeled.csv", dir + "/out2");
  RunResult second = run_all(cfg2);
  CHECK(second.labeled.rows.size() == first.labeled.rows.size());
  CHECK(second.labeled.summary.size() == first.labeled.summary.size());
  CHECK(oracle::slurp(cfg.output_dir + "/labeled.csv") ==
        oracle::slurp(cfg2.output_dir + "/labeled.csv"));
}

TEST_CASE("full synthetic run: every subset keeps the count identity and finds fraud") {
  SynthConfig synth;
  synth.auctions = 60;
  synth.bidder_pool = 60;
  synth.shill_fraction = 0.3;
  synth.mean_bidders_per_auction = 5;
  auto ds = generate_synthetic(synth, 4242);

  std::string dir = oracle::test_dir("pipe_synth");
  write_bids_csv(dir + "/bids.csv", ds.records);

  PipelineConfig cfg;
  cfg.input = dir + "/bids.csv";
  cfg.kind = InputKind::bids;
  cfg.output_dir = dir + "/out";
  cfg.seed = 7;
  cfg.k_max = 10;
  RunResult r = run_all(cfg);

  CHECK(r.labeled.summary.size() == 5);  // five durations in the default mix
  int suspicious_total = 0;
  for (const auto& s : r.labeled.summary) {
    CHECK(s.normal + s.suspicious == s.instances);
    CHECK(s.suspicious >= 1);
    suspicious_total += s.suspicious;
  }
  CHECK(suspicious_total > 0);
  CHECK(suspicious_total < static_cast<int>(r.labeled.rows.size()) / 2);
}

TEST_CASE("outlier dissolution and sampling run through the whole pipeline") {
  SynthConfig synth;
  synth.auctions = 40;
  synth.bidder_pool = 50;
  synth.shill_fraction = 0.2;
  auto ds = generate_synthetic(synth, 321);

  std::string dir = oracle::test_dir("pipe_options");
  write_bids_csv(dir + "/bids.csv", ds.records);

  PipelineConfig cfg;
  cfg.input = dir + "/bids.csv";
  cfg.kind = InputKind::bids;
  cfg.output_dir = dir + "/out1";
  cfg.seed = 12;
  cfg.k_max = 8;
  cfg.cure_base.outlier_elimination = true;
  cfg.cure_base.outlier_min_size = 2;
  cfg.cure_base.sample_fraction = 0.8;
  RunResult r = run_all(cfg);
  for (const auto& s : r.labeled.summary) CHECK(s.normal + s.suspicious == s.instances);

  std::size_t covered = 0;
  for (const auto& run : r.subsets) {
    for (const auto& c : run.sweep.clusters) covered += c.members.size();
  }
  CHECK(covered == r.labeled.rows.size());

  cfg.output_dir = dir + "/out2";
  run_all(cfg);
  CHECK(oracle::same_tree(dir + "/out1", dir + "/out2"));
}

TEST_CASE("stage re-run from persisted artifacts is byte-identical") {
  SynthConfig synth;
  synth.auctions = 20;
  synth.bidder_pool = 30;
  synth.shill_fraction = 0.2;
  auto ds = generate_synthetic(synth, 99);

  std::string dir = oracle::test_dir("pipe_purity");
  write_bids_csv(dir + "/bids.csv", ds.records);

  PipelineConfig cfg;
  cfg.input = dir + "/bids.csv";
  cfg.kind = InputKind::bids;
  cfg.output_dir = dir + "/out";
  cfg.seed = 31;
  cfg.k_max = 8;
  run_all(cfg);

  // features stage, replayed from the persisted clean bid log.
  auto reparsed = preprocess(parse_bids_csv(cfg.output_dir + "/clean_bids.csv"));
  auto iset = compute_instances(reparsed);
  CHECK(render_instances_csv(iset.instances) == oracle::slurp(cfg.output_dir + "/instances.csv"));

  // stats stage, replayed from a persisted subset artifact.
  for (const auto& entry :
       std::filesystem::directory_iterator(std::filesystem::path(cfg.output_dir) / "subsets")) {
    auto loaded = read_instances_csv((entry.path() / "instances.csv").string());
    quantize_features(loaded.instances);
    CHECK(render_stats_csv(compute_stats(loaded.instances)) ==
          oracle::slurp((entry.path() / "stats.csv").string()));
  }
}

TEST_CASE("config validation and file loading") {
  PipelineConfig cfg;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);  // no input
  cfg.input = "x.csv";
  cfg.output_dir = "out";
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);  // no seed
  cfg.seed = 1;
  CHECK_NOTHROW(validate_config(cfg));
  cfg.k_min = 1;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  std::string dir = oracle::test_dir("pipe_config");
  write_file(dir + "/cfg.json",
             "{\n"
             "  \"input\": \"bids.csv\",\n"
             "  \"input_kind\": \"instances\",\n"
             "  \"output_dir\": \"out\",\n"
             "  \"seed\": 9,\n"
             "  \"k_min\": 2,\n"
             "  \"k_max\": 12,\n"
             "  \"reps\": [5, 10],\n"
             "  \"alphas\": [0.1, 0.01],\n"
             "  \"min_cluster_size\": 4,\n"
             "  \"threads\": 2\n"
             "}\n");
  auto loaded = load_config_file(dir + "/cfg.json");
  CHECK(loaded.kind == InputKind::instances);
  CHECK(loaded.seed == 9);
  CHECK(loaded.k_max == 12);
  CHECK(loaded.grid.rp_values == std::vector<int>{5, 10});
  CHECK(loaded.grid.min_cluster_size == 4);

  write_file(dir + "/bad.json", "{ \"sed\": 9 }");
  CHECK_THROWS_AS(load_config_file(dir + "/bad.json"), ConfigError);
  write_file(dir + "/broken.json", "{ not json");
  CHECK_THROWS_AS(load_config_file(dir + "/broken.json"), ConfigError);
}

TEST_CASE("a failing stage leaves a .partial marker and raises StageError") {
  std::string dir = oracle::test_dir("pipe_partial");
  write_file(dir + "/bids.csv", "wrong header\n");
  PipelineConfig cfg;
  cfg.input = dir + "/bids.csv";
  cfg.output_dir = dir + "/out";
  cfg.seed = 3;
  CHECK_THROWS_AS(run_all(cfg), StageError);
  CHECK(std::filesystem::exists(dir + "/out/FAILED.partial"));
  auto marker = oracle::slurp(dir + "/out/FAILED.partial");
  CHECK(marker.find("stage=ingest") != std::string::npos);
}

TEST_CASE("report rendering copes with partial artifact sets") {
  std::string dir = oracle::test_dir("pipe_report");
  // Full artifacts.
  std::string input = small_instance_file(dir);
  auto cfg = instance_config(input, dir + "/out");
  run_all(cfg);
  std::ostringstream notices;
  auto written = render_reports(cfg.output_dir, notices);
  CHECK(written.size() == 4);
  CHECK(notices.str().empty());

  // Stats artifacts only.
  std::string partial = dir + "/partial";
  std::filesystem::create_directories(partial + "/subsets/1d");
  std::filesystem::copy_file(cfg.output_dir + "/subsets/1d/stats.csv",
                             partial + "/subsets/1d/stats.csv");
  std::ostringstream notices2;
  auto written2 = render_reports(partial, notices2);
  CHECK(written2.size() == 1);
  CHECK(notices2.str().find("optk") != std::string::npos);
  CHECK(notices2.str().find("sweep") != std::string::npos);
  CHECK(notices2.str().find("label") != std::string::npos);

  // Nothing at all.
  std::string empty = dir + "/empty";
  std::filesystem::create_directories(empty);
  std::ostringstream notices3;
  CHECK_THROWS_AS(render_reports(empty, notices3), DataError);
}
