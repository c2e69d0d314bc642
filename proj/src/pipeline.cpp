#include "sbl/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sbl/csv.hpp"
#include "sbl/errors.hpp"
#include "sbl/features.hpp"
#include "sbl/kmeans.hpp"
#include "sbl/rng.hpp"

namespace fs = std::filesystem;

namespace sbl {

PipelineConfig load_config_file(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  PipelineConfig cfg;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "input") {
        cfg.input = it->get<std::string>();
      } else if (key == "input_kind") {
        const auto kind = it->get<std::string>();
        if (kind == "bids")
          cfg.kind = InputKind::bids;
        else if (kind == "instances")
          cfg.kind = InputKind::instances;
        else
          throw ConfigError(path + ": input_kind must be 'bids' or 'instances'");
      } else if (key == "output_dir") {
        cfg.output_dir = it->get<std::string>();
      } else if (key == "seed") {
        cfg.seed = it->get<std::uint64_t>();
      } else if (key == "k_min") {
        cfg.k_min = it->get<int>();
      } else if (key == "k_max") {
        cfg.k_max = it->get<int>();
      } else if (key == "reps") {
        cfg.grid.rp_values = it->get<std::vector<int>>();
      } else if (key == "alphas") {
        cfg.grid.alpha_values = it->get<std::vector<double>>();
      } else if (key == "min_cluster_size") {
        cfg.grid.min_cluster_size = it->get<int>();
      } else if (key == "sample_fraction") {
        cfg.cure_base.sample_fraction = it->get<double>();
      } else if (key == "outlier_elimination") {
        cfg.cure_base.outlier_elimination = it->get<bool>();
      } else if (key == "outlier_min_size") {
        cfg.cure_base.outlier_min_size = it->get<int>();
      } else if (key == "threads") {
        cfg.threads = it->get<int>();
      } else {
        throw ConfigError(path + ": unknown config key '" + key + "'");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return cfg;
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("input path is required");
  if (cfg.output_dir.empty()) throw ConfigError("output directory is required");
  if (!cfg.seed.has_value()) throw ConfigError("seed is required for reproducible runs");
  if (cfg.k_min < 2) throw ConfigError("k_min must be >= 2");
  if (cfg.k_max < cfg.k_min) throw ConfigError("k_max must be >= k_min");
  if (cfg.grid.rp_values.empty() || cfg.grid.alpha_values.empty())
    throw ConfigError("sweep grid must list at least one rp and one alpha");
  for (int rp : cfg.grid.rp_values)
    if (rp < 1) throw ConfigError("rp values must be >= 1");
  for (double a : cfg.grid.alpha_values)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha values must be in [0, 1]");
  if (cfg.grid.min_cluster_size < 1) throw ConfigError("min_cluster_size must be >= 1");
  if (!(cfg.cure_base.sample_fraction > 0.0 && cfg.cure_base.sample_fraction <= 1.0))
    throw ConfigError("sample_fraction must be in (0, 1]");
  if (cfg.cure_base.outlier_min_size < 0) throw ConfigError("outlier_min_size must be >= 0");
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
}

std::uint64_t subset_seed(std::uint64_t master, std::int64_t duration_seconds,
                          std::uint64_t stage_salt) {
  return derive_seed(master, static_cast<std::uint64_t>(duration_seconds), stage_salt);
}

std::uint64_t cure_cell_seed(std::uint64_t master, std::int64_t duration_seconds, int rp,
                             double alpha) {
  return derive_seed(subset_seed(master, duration_seconds, kSweepSalt),
                     static_cast<std::uint64_t>(rp), std::bit_cast<std::uint64_t>(alpha));
}

void quantize_features(std::vector<SBInstance>& instances) {
  for (SBInstance& inst : instances)
    for (double& v : inst.f) {
      const std::string s = fmt_fixed(v, 6);
      double q = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), q);
      v = q;
    }
}

std::string render_stats_csv(const SubsetStats& stats) {
  std::string out = "pattern,mean,std\n";
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    out += kFeatureNames[f];
    out += ',';
    out += fmt_fixed(stats.mean[f], 6);
    out += ',';
    out += fmt_fixed(stats.stddev[f], 6);
    out += '\n';
  }
  out += "avg,";
  out += fmt_fixed(stats.avg_means, 6);
  out += ',';
  out += fmt_fixed(stats.avg_stds, 6);
  out += '\n';
  return out;
}

SubsetStats parse_stats_csv(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.size() < kNumFeatures + 2 || lines[0] != "pattern,mean,std")
    throw DataError(path + ": not a stats artifact");
  SubsetStats stats;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    auto cols = split_csv_line(lines[f + 1]);
    if (cols.size() != 3 || cols[0] != kFeatureNames[f])
      throw DataError(path + ": unexpected row '" + lines[f + 1] + "'");
    stats.mean[f] = parse_double(cols[1], path + " mean " + kFeatureNames[f]);
    stats.stddev[f] = parse_double(cols[2], path + " std " + kFeatureNames[f]);
  }
  auto avg = split_csv_line(lines[kNumFeatures + 1]);
  if (avg.size() != 3 || avg[0] != "avg") throw DataError(path + ": missing avg row");
  stats.avg_means = parse_double(avg[1], path + " avg means");
  stats.avg_stds = parse_double(avg[2], path + " avg stds");
  return stats;
}

std::string render_silhouette_csv(const KSweepResult& result) {
  std::string out = "k,score\n";
  for (const auto& [k, score] : result.scores) {
    out += std::to_string(k);
    out += ',';
    out += fmt_fixed(score, 6);
    out += '\n';
  }
  return out;
}

std::string render_best_k_csv(int best_k, double best_score) {
  return "best_k,best_score\n" + std::to_string(best_k) + "," + fmt_fixed(best_score, 6) + "\n";
}

std::string render_sweep_csv(const SweepResult& result, int target_k, int min_cluster_size) {
  std::string out = "# selection: maximize clusters with size >= " +
                    std::to_string(min_cluster_size) +
                    ", ties broken by size-distribution entropy\n";
  out += "rp,alpha";
  for (int i = 1; i <= target_k; ++i) out += ",size_" + std::to_string(i);
  out += ",score,chosen\n";
  for (const SweepCell& cell : result.report) {
    out += std::to_string(cell.rp);
    out += ',';
    out += fmt_shortest(cell.alpha);
    for (int i = 0; i < target_k; ++i) {
      out += ',';
      if (cell.ok) out += std::to_string(cell.sizes[static_cast<std::size_t>(i)]);
    }
    out += ',';
    if (cell.ok) out += fmt_fixed(sweep_display_score(cell, target_k), 6);
    out += ',';
    out += cell.chosen ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string render_assignments_csv(const Subset& subset,
                                   const std::vector<CureCluster>& clusters) {
  std::vector<int> cluster_of(subset.instances.size(), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int idx : clusters[c].members) cluster_of[static_cast<std::size_t>(idx)] = static_cast<int>(c);
  std::string out = "auction_id,bidder_id,cluster_id\n";
  for (std::size_t i = 0; i < subset.instances.size(); ++i) {
    out += subset.instances[i].auction_id;
    out += ',';
    out += subset.instances[i].bidder_id;
    out += ',';
    out += std::to_string(cluster_of[i]);
    out += '\n';
  }
  return out;
}

std::string render_clusters_csv(const std::vector<CureCluster>& clusters) {
  std::string out = "cluster_id,size";
  for (std::size_t f = 0; f < kNumFeatures; ++f) out += ",centroid_" + std::to_string(f);
  out += '\n';
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    out += std::to_string(c);
    out += ',';
    out += std::to_string(clusters[c].members.size());
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      out += ',';
      out += fmt_fixed(clusters[c].centroid[f], 6);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_partial_marker(const std::string& out_dir, const std::string& stage,
                          const std::string& subset, const std::string& cause) {
  std::string body = "stage=" + stage + "\n";
  if (!subset.empty()) body += "subset=" + subset + "\n";
  body += "error=" + cause + "\n";
  write_file((fs::path(out_dir) / "FAILED.partial").string(), body);
}

std::vector<FeatureVector> subset_points(const Subset& subset) {
  std::vector<FeatureVector> pts;
  pts.reserve(subset.instances.size());
  for (const SBInstance& inst : subset.instances) pts.push_back(inst.f);
  return pts;
}

}  // namespace

RunResult run_all(const PipelineConfig& cfg) {
  validate_config(cfg);
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  const std::uint64_t master = *cfg.seed;

  auto stage = [&](const char* name, const std::string& subset, auto&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const std::exception& e) {
      write_partial_marker(cfg.output_dir, name, subset, e.what());
      throw StageError(name, subset, e.what());
    }
  };

  std::vector<SBInstance> instances;
  std::vector<double> days;
  bool has_days = false;
  CleanDataset dataset;
  bool have_dataset = false;

  if (cfg.kind == InputKind::bids) {
    stage("ingest", "", [&] {
      dataset = preprocess(parse_bids_csv(cfg.input));
      write_bids_csv((out / "clean_bids.csv").string(), dataset.records);
    });
    have_dataset = true;
    stage("features", "", [&] {
      InstanceSet iset = compute_instances(dataset);
      instances = std::move(iset.instances);
      quantize_features(instances);
      write_file((out / "instances.csv").string(), render_instances_csv(instances));
    });
  } else {
    stage("ingest", "", [&] {
      LoadedInstances li = read_instances_csv(cfg.input);
      instances = std::move(li.instances);
      days = std::move(li.duration_days);
      has_days = li.has_durations;
      quantize_features(instances);
      write_file((out / "instances.csv").string(), render_instances_csv(instances));
    });
  }

  std::map<std::int64_t, Subset> subsets = stage("partition", "", [&] {
    if (have_dataset) return partition_by_duration(instances, dataset);
    if (has_days) return partition_by_days(instances, days);
    std::map<std::int64_t, Subset> all;
    Subset& s = all[0];
    s.duration_seconds = 0;
    s.duration_days = 0.0;
    s.instances = instances;
    return all;
  });
  for (const auto& [dur, subset] : subsets) {
    std::vector<double> col(subset.instances.size(), subset.duration_days);
    write_file((out / "subsets" / subset_label(dur) / "instances.csv").string(),
               render_instances_csv(subset.instances, col));
  }

  RunResult result;
  std::vector<ClusteredSubset> clustered;
  for (const auto& [dur, subset] : subsets) {
    const std::string label = subset_label(dur);
    const fs::path sdir = out / "subsets" / label;

    SubsetRun run;
    run.subset = subset;
    run.stats = stage("stats", label, [&] { return compute_stats(subset.instances); });
    write_file((sdir / "stats.csv").string(), render_stats_csv(run.stats));

    const std::vector<FeatureVector> points = subset_points(subset);
    const std::size_t distinct = count_distinct(points);

    int target_k = 1;
    if (distinct >= static_cast<std::size_t>(cfg.k_min)) {
      run.ksweep = stage("optk", label, [&] {
        return optimal_k(points, subset_seed(master, dur, kOptkSalt), cfg.k_min, cfg.k_max,
                         cfg.threads);
      });
      target_k = run.ksweep.best_k;
    }
    run.chosen_k = target_k;
    write_file((sdir / "silhouette.csv").string(), render_silhouette_csv(run.ksweep));
    write_file((sdir / "best_k.csv").string(),
               render_best_k_csv(target_k, run.ksweep.best_score));

    run.sweep = stage("sweep", label, [&] {
      return sweep_params(points, target_k, cfg.grid, subset_seed(master, dur, kSweepSalt),
                          cfg.cure_base, cfg.threads);
    });
    write_file((sdir / "sweep.csv").string(),
               render_sweep_csv(run.sweep, target_k, cfg.grid.min_cluster_size));
    write_file((sdir / "assignments.csv").string(),
               render_assignments_csv(subset, run.sweep.clusters));
    write_file((sdir / "clusters.csv").string(), render_clusters_csv(run.sweep.clusters));

    ClusteredSubset cs;
    cs.subset = subset;
    cs.stats = run.stats;
    cs.clusters = run.sweep.clusters;
    cs.rp = run.sweep.rp;
    cs.alpha = run.sweep.alpha;
    clustered.push_back(std::move(cs));
    result.subsets.push_back(std::move(run));
  }

  result.labeled = stage("label", "", [&] { return label_dataset(clustered); });
  write_file((out / "labeled.csv").string(), render_labeled_csv(result.labeled));
  write_file((out / "summary.csv").string(), render_summary_csv(result.labeled));

  stage("report", "", [&] {
    std::ostringstream sink;
    render_reports(cfg.output_dir, sink);
  });
  return result;
}

namespace {

struct SubsetDir {
  double days;
  std::string label;
  fs::path path;
};

std::vector<SubsetDir> list_subset_dirs(const fs::path& run_dir) {
  std::vector<SubsetDir> subs;
  const fs::path sdir = run_dir / "subsets";
  if (fs::is_directory(sdir)) {
    for (const auto& entry : fs::directory_iterator(sdir)) {
      if (!entry.is_directory()) continue;
      const std::string label = entry.path().filename().string();
      double days = -1.0;
      if (label != "all") {
        if (label.empty() || label.back() != 'd') continue;
        try {
          days = parse_double(label.substr(0, label.size() - 1), "subset dir " + label);
        } catch (const DataError&) {
          continue;
        }
      }
      subs.push_back({days, label, entry.path()});
    }
  }
  std::sort(subs.begin(), subs.end(), [](const SubsetDir& a, const SubsetDir& b) {
    if (a.days != b.days) return a.days < b.days;
    return a.label < b.label;
  });
  return subs;
}

void validate_summary_file(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != kSummaryCsvHeader)
    throw DataError(path + ": not a summary artifact");
  long long sum_normal = 0, sum_susp = 0, sum_inst = 0;
  bool saw_total = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cols = split_csv_line(lines[i]);
    if (cols.size() != 8) throw DataError(path + ": malformed row '" + lines[i] + "'");
    const std::string where = path + " row " + std::to_string(i + 1);
    long long inst = parse_int(cols[2], where + " instances");
    long long normal = parse_int(cols[6], where + " normal");
    long long susp = parse_int(cols[7], where + " suspicious");
    if (normal + susp != inst)
      throw DataError(where + ": normal + suspicious != instances (" + std::to_string(normal) +
                      " + " + std::to_string(susp) + " != " + std::to_string(inst) + ")");
    if (cols[0] == "total") {
      saw_total = true;
      if (inst != sum_inst || normal != sum_normal || susp != sum_susp)
        throw DataError(where + ": totals do not match the per-subset rows");
    } else {
      sum_inst += inst;
      sum_normal += normal;
      sum_susp += susp;
    }
  }
  if (!saw_total) throw DataError(path + ": missing totals row");
}

}  // namespace

std::vector<std::string> render_reports(const std::string& run_dir, std::ostream& notices) {
  const fs::path root(run_dir);
  const std::vector<SubsetDir> subs = list_subset_dirs(root);
  std::vector<std::string> written;

  // Stats table: patterns as rows, subsets as columns.
  {
    std::vector<std::pair<std::string, SubsetStats>> stats;
    for (const SubsetDir& s : subs)
      if (fs::exists(s.path / "stats.csv"))
        stats.emplace_back(s.label, parse_stats_csv((s.path / "stats.csv").string()));
    if (stats.empty()) {
      notices << "notice: no subset statistics artifacts found (partition stage); "
                 "skipping stats table\n";
    } else {
      std::string outp = "statistic,pattern";
      for (const auto& [label, st] : stats) outp += "," + label;
      outp += '\n';
      for (std::size_t f = 0; f < kNumFeatures; ++f) {
        outp += std::string("mean,") + kFeatureNames[f];
        for (const auto& [label, st] : stats) outp += "," + fmt_fixed(st.mean[f], 6);
        outp += '\n';
      }
      outp += "mean,avg";
      for (const auto& [label, st] : stats) outp += "," + fmt_fixed(st.avg_means, 6);
      outp += '\n';
      for (std::size_t f = 0; f < kNumFeatures; ++f) {
        outp += std::string("std,") + kFeatureNames[f];
        for (const auto& [label, st] : stats) outp += "," + fmt_fixed(st.stddev[f], 6);
        outp += '\n';
      }
      outp += "std,avg";
      for (const auto& [label, st] : stats) outp += "," + fmt_fixed(st.avg_stds, 6);
      outp += '\n';
      const std::string path = (root / "reports" / "stats_table.csv").string();
      write_file(path, outp);
      written.push_back(path);
    }
  }

  // Silhouette curves, one row per (subset, k).
  {
    std::string body;
    bool any = false;
    for (const SubsetDir& s : subs) {
      const fs::path f = s.path / "silhouette.csv";
      if (!fs::exists(f)) continue;
      any = true;
      std::vector<std::string> lines = read_lines(f.string());
      for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) body += s.label + "," + lines[i] + "\n";
    }
    if (!any) {
      notices << "notice: no silhouette artifacts found (optk stage); skipping curve table\n";
    } else {
      const std::string path = (root / "reports" / "silhouette_curves.csv").string();
      write_file(path, "subset,k,score\n" + body);
      written.push_back(path);
    }
  }

  // Sweep tables, one section per subset.
  {
    std::string body;
    bool any = false;
    for (const SubsetDir& s : subs) {
      const fs::path f = s.path / "sweep.csv";
      if (!fs::exists(f)) continue;
      any = true;
      body += "# subset " + s.label + "\n";
      for (const std::string& line : read_lines(f.string()))
        if (!line.empty()) body += line + "\n";
      body += "\n";
    }
    if (!any) {
      notices << "notice: no sweep artifacts found (sweep stage); skipping sweep tables\n";
    } else {
      const std::string path = (root / "reports" / "sweep_tables.csv").string();
      write_file(path, body);
      written.push_back(path);
    }
  }

  // Summary table: the label stage output, re-validated.
  {
    const fs::path f = root / "summary.csv";
    if (!fs::exists(f)) {
      notices << "notice: no summary artifact found (label stage); skipping summary table\n";
    } else {
      validate_summary_file(f.string());
      std::string content;
      for (const std::string& line : read_lines(f.string()))
        if (!line.empty()) content += line + "\n";
      const std::string path = (root / "reports" / "summary_table.csv").string();
      write_file(path, content);
      written.push_back(path);
    }
  }

  if (written.empty())
    throw DataError("no pipeline artifacts in " + run_dir +
                    " (run at least the partition stage first)");
  return written;
}

}  // namespace sbl
