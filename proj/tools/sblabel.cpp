// sblabel: shill-bidding dataset production and labeling pipeline.
//
// Stages are exposed as subcommands (synth, ingest, features, partition,
// optk, sweep, cluster, label, run, report). Every stage is deterministic in
// its inputs and --seed; per-subset seeds derive from (seed, duration), so a
// stage re-run on a persisted subset artifact reproduces the full run's
// output byte for byte.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbl/csv.hpp"
#include "sbl/errors.hpp"
#include "sbl/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sbl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitStage = 4;

std::map<int, double> parse_duration_mix(const std::string& text) {
  std::map<int, double> mix;
  for (const std::string& part : split_csv_line(text)) {
    auto pos = part.find(':');
    if (pos == std::string::npos)
      throw ConfigError("duration mix entry '" + part + "' is not days:weight");
    mix[static_cast<int>(parse_int(part.substr(0, pos), "duration mix days"))] =
        parse_double(part.substr(pos + 1), "duration mix weight");
  }
  return mix;
}

// Loads a (subset) instance CSV and returns it as a Subset. All rows must
// share one duration; files without a duration column land in the catch-all
// subset (duration 0).
Subset load_subset(const std::string& path) {
  LoadedInstances li = read_instances_csv(path);
  quantize_features(li.instances);
  Subset s;
  if (li.has_durations) {
    auto groups = partition_by_days(li.instances, li.duration_days);
    if (groups.size() != 1)
      throw DataError(path + ": holds " + std::to_string(groups.size()) +
                      " durations; stage commands expect one subset file (use 'partition' first)");
    s = std::move(groups.begin()->second);
  } else {
    s.instances = std::move(li.instances);
  }
  return s;
}

std::vector<FeatureVector> points_of(const Subset& s) {
  std::vector<FeatureVector> pts;
  pts.reserve(s.instances.size());
  for (const auto& inst : s.instances) pts.push_back(inst.f);
  return pts;
}

int cmd_synth(const std::string& output, const SynthConfig& cfg, std::uint64_t seed) {
  CleanDataset ds = generate_synthetic(cfg, seed);
  write_bids_csv(output, ds.records);
  std::printf("wrote %s: %zu auctions, %zu records\n", output.c_str(), ds.auction_index.size(),
              ds.records.size());
  return 0;
}

int cmd_ingest(const std::string& input, const std::string& out_dir) {
  CleanDataset ds = preprocess(parse_bids_csv(input));
  const std::string path = (fs::path(out_dir) / "clean_bids.csv").string();
  write_bids_csv(path, ds.records);
  std::set<std::string> bidders, sellers;
  for (const auto& r : ds.records) {
    bidders.insert(r.bidder_id);
    sellers.insert(r.seller_id);
  }
  std::printf("auctions: %zu\nrecords: %zu\nbidders: %zu\nsellers: %zu\n",
              ds.auction_index.size(), ds.records.size(), bidders.size(), sellers.size());
  std::printf("mean bids per auction: %s\nmean start price: %s\n",
              fmt_fixed(ds.aggregates.mean_bids_per_auction, 4).c_str(),
              fmt_fixed(ds.aggregates.mean_start_price, 2).c_str());
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_features(const std::string& input, const std::string& out_dir) {
  CleanDataset ds = preprocess(parse_bids_csv(input));
  InstanceSet iset = compute_instances(ds);
  const std::string path = (fs::path(out_dir) / "instances.csv").string();
  write_instances_csv(path, iset.instances);
  if (iset.skipped_auctions > 0)
    std::fprintf(stderr, "warning: skipped %d auctions without bids\n", iset.skipped_auctions);
  std::printf("wrote %s (%zu instances)\n", path.c_str(), iset.instances.size());
  return 0;
}

int cmd_partition(const std::string& input, const std::string& bids,
                  const std::string& out_dir) {
  LoadedInstances li = read_instances_csv(input);
  quantize_features(li.instances);
  std::map<std::int64_t, Subset> subsets;
  if (li.has_durations) {
    subsets = partition_by_days(li.instances, li.duration_days);
  } else if (!bids.empty()) {
    CleanDataset ds = preprocess(parse_bids_csv(bids));
    subsets = partition_by_duration(li.instances, ds);
  } else {
    Subset& s = subsets[0];
    s.instances = std::move(li.instances);
  }
  for (const auto& [dur, subset] : subsets) {
    const std::string label = subset_label(dur);
    const fs::path sdir = fs::path(out_dir) / "subsets" / label;
    std::vector<double> col(subset.instances.size(), subset.duration_days);
    write_file((sdir / "instances.csv").string(),
               render_instances_csv(subset.instances, col));
    write_file((sdir / "stats.csv").string(), render_stats_csv(compute_stats(subset.instances)));
    std::printf("%s: %zu instances\n", label.c_str(), subset.instances.size());
  }
  return 0;
}

int cmd_optk(const std::string& input, const std::string& out_dir, std::uint64_t seed, int k_min,
             int k_max, int threads) {
  Subset s = load_subset(input);
  KSweepResult r = optimal_k(points_of(s), subset_seed(seed, s.duration_seconds, kOptkSalt),
                             k_min, k_max, threads);
  if (!out_dir.empty()) {
    const fs::path sdir = fs::path(out_dir) / "subsets" / subset_label(s.duration_seconds);
    write_file((sdir / "silhouette.csv").string(), render_silhouette_csv(r));
    write_file((sdir / "best_k.csv").string(), render_best_k_csv(r.best_k, r.best_score));
  }
  for (const auto& [k, score] : r.scores)
    std::printf("%d,%s\n", k, fmt_fixed(score, 6).c_str());
  std::printf("best_k=%d score=%s\n", r.best_k, fmt_fixed(r.best_score, 6).c_str());
  return 0;
}

int cmd_cluster(const std::string& input, const std::string& out_dir, std::uint64_t seed,
                int target_k, const CureParams& base, int rp, double alpha) {
  Subset s = load_subset(input);
  CureParams params = base;
  params.num_reps = rp;
  params.alpha = alpha;
  params.target_k = target_k;
  auto clusters = cure_cluster(points_of(s), params,
                               cure_cell_seed(seed, s.duration_seconds, rp, alpha));
  const fs::path sdir = fs::path(out_dir) / "subsets" / subset_label(s.duration_seconds);
  write_file((sdir / "assignments.csv").string(), render_assignments_csv(s, clusters));
  write_file((sdir / "clusters.csv").string(), render_clusters_csv(clusters));
  for (std::size_t c = 0; c < clusters.size(); ++c)
    std::printf("cluster %zu: %zu members\n", c, clusters[c].members.size());
  return 0;
}

int cmd_sweep(const std::string& input, const std::string& out_dir, std::uint64_t seed,
              int target_k, const SweepGrid& grid, const CureParams& base, int threads) {
  Subset s = load_subset(input);
  SweepResult r = sweep_params(points_of(s), target_k, grid,
                               subset_seed(seed, s.duration_seconds, kSweepSalt), base, threads);
  const fs::path sdir = fs::path(out_dir) / "subsets" / subset_label(s.duration_seconds);
  write_file((sdir / "sweep.csv").string(), render_sweep_csv(r, target_k, grid.min_cluster_size));
  write_file((sdir / "assignments.csv").string(), render_assignments_csv(s, r.clusters));
  write_file((sdir / "clusters.csv").string(), render_clusters_csv(r.clusters));
  std::printf("chosen rp=%d alpha=%s\n", r.rp, fmt_shortest(r.alpha).c_str());
  return 0;
}

int cmd_label(const std::string& input, const std::string& assignments,
              const std::string& out_dir, int rp, double alpha) {
  Subset s = load_subset(input);

  std::vector<std::string> lines = read_lines(assignments);
  if (lines.empty() || lines[0] != "auction_id,bidder_id,cluster_id")
    throw DataError(assignments + ": not an assignments artifact");
  std::map<std::pair<std::string, std::string>, int> cluster_of;
  int max_cluster = -1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cols = split_csv_line(lines[i]);
    if (cols.size() != 3) throw DataError(assignments + ": malformed row '" + lines[i] + "'");
    int c = static_cast<int>(parse_int(cols[2], assignments + " cluster_id"));
    cluster_of[{cols[0], cols[1]}] = c;
    max_cluster = std::max(max_cluster, c);
  }

  ClusteredSubset cs;
  cs.subset = s;
  cs.stats = compute_stats(s.instances);
  cs.rp = rp;
  cs.alpha = alpha;
  cs.clusters.resize(static_cast<std::size_t>(max_cluster + 1));
  for (std::size_t i = 0; i < s.instances.size(); ++i) {
    auto it = cluster_of.find({s.instances[i].auction_id, s.instances[i].bidder_id});
    if (it == cluster_of.end())
      throw DataError("instance " + s.instances[i].auction_id + "/" + s.instances[i].bidder_id +
                      " has no cluster assignment");
    cs.clusters[static_cast<std::size_t>(it->second)].members.push_back(static_cast<int>(i));
  }
  for (const auto& c : cs.clusters)
    if (c.members.empty()) throw DataError(assignments + ": cluster ids are not contiguous");

  LabeledDataset labeled = label_dataset({cs});
  write_file((fs::path(out_dir) / "labeled.csv").string(), render_labeled_csv(labeled));
  write_file((fs::path(out_dir) / "summary.csv").string(), render_summary_csv(labeled));
  const SubsetSummary& sum = labeled.summary.front();
  std::printf("%s: %d normal, %d suspicious\n", sum.partition.c_str(), sum.normal,
              sum.suspicious);
  return 0;
}

int cmd_run(const PipelineConfig& cfg) {
  RunResult r = run_all(cfg);
  std::printf("%s", render_summary_csv(r.labeled).c_str());
  std::printf("wrote %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_report(const std::string& input) {
  auto written = render_reports(input, std::cout);
  for (const auto& p : written) std::printf("wrote %s\n", p.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shill-bidding dataset production and labeling pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic bid log");
  std::string synth_output;
  std::string synth_mix;
  SynthConfig synth_cfg;
  std::uint64_t synth_seed = 0;
  synth->add_option("--output", synth_output, "bid log CSV to write")->required();
  synth->add_option("--seed", synth_seed, "generator seed")->required();
  synth->add_option("--auctions", synth_cfg.auctions, "number of auctions");
  synth->add_option("--bidders", synth_cfg.bidder_pool, "bidder pool size");
  synth->add_option("--shill-fraction", synth_cfg.shill_fraction, "fraction of shill bidders");
  synth->add_option("--durations", synth_mix, "duration mix, e.g. 1:0.2,7:0.8");
  synth->add_option("--price-min", synth_cfg.price_min, "lowest start price");
  synth->add_option("--price-max", synth_cfg.price_max, "highest start price");
  synth->add_option("--mean-bidders", synth_cfg.mean_bidders_per_auction,
                    "mean honest bidders per auction");

  // ingest / features
  auto* ingest = app.add_subcommand("ingest", "parse and clean a raw bid log");
  std::string in_path, out_dir = "out";
  ingest->add_option("--input", in_path, "bid log CSV")->required();
  ingest->add_option("--output-dir", out_dir, "artifact directory");

  auto* features = app.add_subcommand("features", "compute instance metrics from a clean bid log");
  std::string feat_input, feat_out = "out";
  features->add_option("--input", feat_input, "clean bid log CSV")->required();
  features->add_option("--output-dir", feat_out, "artifact directory");

  // partition
  auto* partition = app.add_subcommand("partition", "split instances by bidding duration");
  std::string part_input, part_bids, part_out = "out";
  partition->add_option("--input", part_input, "instance CSV")->required();
  partition->add_option("--bids", part_bids, "clean bid log (when the instance CSV has no durations)");
  partition->add_option("--output-dir", part_out, "artifact directory");

  // optk
  auto* optk = app.add_subcommand("optk", "pick the cluster count by silhouette sweep");
  std::string optk_input, optk_out;
  std::uint64_t optk_seed = 0;
  int optk_kmin = 2, optk_kmax = 20, optk_threads = 0;
  optk->add_option("--input", optk_input, "subset instance CSV")->required();
  optk->add_option("--seed", optk_seed, "master seed")->required();
  optk->add_option("--output-dir", optk_out, "artifact directory (optional)");
  optk->add_option("--k-min", optk_kmin, "smallest k");
  optk->add_option("--k-max", optk_kmax, "largest k");
  optk->add_option("--threads", optk_threads, "worker threads (0 = auto)");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "run CURE with fixed parameters");
  std::string clu_input, clu_out = "out";
  std::uint64_t clu_seed = 0;
  int clu_k = 0, clu_rp = 10;
  double clu_alpha = 0.3;
  CureParams clu_base;
  cluster->add_option("--input", clu_input, "subset instance CSV")->required();
  cluster->add_option("--seed", clu_seed, "master seed")->required();
  cluster->add_option("--k", clu_k, "number of clusters")->required();
  cluster->add_option("--rp", clu_rp, "representative points per cluster");
  cluster->add_option("--alpha", clu_alpha, "shrink factor");
  cluster->add_option("--sample-fraction", clu_base.sample_fraction, "clustered sample fraction");
  cluster->add_flag("--outliers", clu_base.outlier_elimination, "dissolve small clusters mid-run");
  cluster->add_option("--outlier-min-size", clu_base.outlier_min_size, "dissolution size threshold");
  cluster->add_option("--output-dir", clu_out, "artifact directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid-search CURE parameters");
  std::string swp_input, swp_out = "out";
  std::uint64_t swp_seed = 0;
  int swp_k = 0, swp_threads = 0;
  SweepGrid swp_grid;
  CureParams swp_base;
  sweep->add_option("--input", swp_input, "subset instance CSV")->required();
  sweep->add_option("--seed", swp_seed, "master seed")->required();
  sweep->add_option("--k", swp_k, "number of clusters")->required();
  sweep->add_option("--reps", swp_grid.rp_values, "rp grid")->delimiter(',');
  sweep->add_option("--alphas", swp_grid.alpha_values, "alpha grid")->delimiter(',');
  sweep->add_option("--min-cluster-size", swp_grid.min_cluster_size,
                    "size from which a cluster counts as non-trivial");
  sweep->add_option("--sample-fraction", swp_base.sample_fraction, "clustered sample fraction");
  sweep->add_flag("--outliers", swp_base.outlier_elimination, "dissolve small clusters mid-run");
  sweep->add_option("--outlier-min-size", swp_base.outlier_min_size, "dissolution size threshold");
  sweep->add_option("--threads", swp_threads, "worker threads (0 = auto)");
  sweep->add_option("--output-dir", swp_out, "artifact directory");

  // label
  auto* label = app.add_subcommand("label", "label clusters against the subset decision line");
  std::string lbl_input, lbl_assign, lbl_out = "out";
  int lbl_rp = 0;
  double lbl_alpha = 0.0;
  label->add_option("--input", lbl_input, "subset instance CSV")->required();
  label->add_option("--assignments", lbl_assign, "assignments CSV")->required();
  label->add_option("--rp", lbl_rp, "rp recorded in the summary");
  label->add_option("--alpha", lbl_alpha, "alpha recorded in the summary");
  label->add_option("--output-dir", lbl_out, "artifact directory");

  // run
  auto* run = app.add_subcommand("run", "execute the full pipeline");
  std::string run_input, run_out, run_kind = "bids", run_config;
  std::uint64_t run_seed = 0;
  PipelineConfig run_cfg;
  run->add_option("--config", run_config, "JSON config file");
  auto* run_input_opt = run->add_option("--input", run_input, "input file");
  auto* run_kind_opt =
      run->add_option("--input-kind", run_kind, "bids | instances")
          ->check(CLI::IsMember({"bids", "instances"}));
  auto* run_out_opt = run->add_option("--output-dir", run_out, "artifact directory");
  auto* run_seed_opt = run->add_option("--seed", run_seed, "master seed");
  auto* run_kmin_opt = run->add_option("--k-min", run_cfg.k_min, "smallest k");
  auto* run_kmax_opt = run->add_option("--k-max", run_cfg.k_max, "largest k");
  auto* run_reps_opt = run->add_option("--reps", run_cfg.grid.rp_values, "rp grid")->delimiter(',');
  auto* run_alphas_opt =
      run->add_option("--alphas", run_cfg.grid.alpha_values, "alpha grid")->delimiter(',');
  auto* run_mcs_opt = run->add_option("--min-cluster-size", run_cfg.grid.min_cluster_size,
                                      "non-trivial cluster size");
  auto* run_sf_opt =
      run->add_option("--sample-fraction", run_cfg.cure_base.sample_fraction, "sample fraction");
  auto* run_out_flag =
      run->add_flag("--outliers", run_cfg.cure_base.outlier_elimination, "outlier dissolution");
  auto* run_oms_opt = run->add_option("--outlier-min-size", run_cfg.cure_base.outlier_min_size,
                                      "dissolution size threshold");
  auto* run_thr_opt = run->add_option("--threads", run_cfg.threads, "worker threads (0 = auto)");

  // report
  auto* report = app.add_subcommand("report", "render merged report tables from a run directory");
  std::string rep_input;
  report->add_option("--input", rep_input, "run artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (synth->parsed()) {
      if (!synth_mix.empty()) synth_cfg.duration_mix = parse_duration_mix(synth_mix);
      return cmd_synth(synth_output, synth_cfg, synth_seed);
    }
    if (ingest->parsed()) return cmd_ingest(in_path, out_dir);
    if (features->parsed()) return cmd_features(feat_input, feat_out);
    if (partition->parsed()) return cmd_partition(part_input, part_bids, part_out);
    if (optk->parsed())
      return cmd_optk(optk_input, optk_out, optk_seed, optk_kmin, optk_kmax, optk_threads);
    if (cluster->parsed())
      return cmd_cluster(clu_input, clu_out, clu_seed, clu_k, clu_base, clu_rp, clu_alpha);
    if (sweep->parsed())
      return cmd_sweep(swp_input, swp_out, swp_seed, swp_k, swp_grid, swp_base, swp_threads);
    if (label->parsed()) return cmd_label(lbl_input, lbl_assign, lbl_out, lbl_rp, lbl_alpha);
    if (run->parsed()) {
      PipelineConfig cfg;
      if (!run_config.empty()) cfg = load_config_file(run_config);
      if (run_input_opt->count()) cfg.input = run_input;
      if (run_kind_opt->count())
        cfg.kind = run_kind == "bids" ? InputKind::bids : InputKind::instances;
      if (run_out_opt->count()) cfg.output_dir = run_out;
      if (run_seed_opt->count()) cfg.seed = run_seed;
      if (run_kmin_opt->count()) cfg.k_min = run_cfg.k_min;
      if (run_kmax_opt->count()) cfg.k_max = run_cfg.k_max;
      if (run_reps_opt->count()) cfg.grid.rp_values = run_cfg.grid.rp_values;
      if (run_alphas_opt->count()) cfg.grid.alpha_values = run_cfg.grid.alpha_values;
      if (run_mcs_opt->count()) cfg.grid.min_cluster_size = run_cfg.grid.min_cluster_size;
      if (run_sf_opt->count()) cfg.cure_base.sample_fraction = run_cfg.cure_base.sample_fraction;
      if (run_out_flag->count()) cfg.cure_base.outlier_elimination = true;
      if (run_oms_opt->count()) cfg.cure_base.outlier_min_size = run_cfg.cure_base.outlier_min_size;
      if (run_thr_opt->count()) cfg.threads = run_cfg.threads;
      return cmd_run(cfg);
    }
    if (report->parsed()) return cmd_report(rep_input);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const StageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitStage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitStage;
  }
  return 0;
}
