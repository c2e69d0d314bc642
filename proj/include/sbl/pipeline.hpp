#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbl/bid_log.hpp"
#include "sbl/labeling.hpp"
#include "sbl/silhouette.hpp"
#include "sbl/sweep.hpp"
#include "sbl/synthetic.hpp"

namespace sbl {

enum class InputKind { bids, instances };

struct PipelineConfig {
  std::string input;
  InputKind kind = InputKind::bids;
  std::string output_dir;
  std::optional<std::uint64_t> seed;  // mandatory; every stage seed derives from it
  int k_min = 2;
  int k_max = 20;
  SweepGrid grid;
  CureParams cure_base;  // sample_fraction / outlier settings; rp, alpha and
                         // target_k are filled in per sweep cell
  int threads = 0;       // 0 = hardware concurrency
};

// Reads a JSON config file. Unknown keys are rejected so typos surface as
// ConfigError instead of silently running with defaults.
PipelineConfig load_config_file(const std::string& path);
void validate_config(const PipelineConfig& config);

// Per-subset stage seeds derive from (master seed, duration), so each subset
// is reproducible in isolation and independent of enumeration order.
inline constexpr std::uint64_t kOptkSalt = 0x0b1a;
inline constexpr std::uint64_t kSweepSalt = 0x5afe;
std::uint64_t subset_seed(std::uint64_t master, std::int64_t duration_seconds,
                          std::uint64_t stage_salt);
// Seed of one CURE run inside a subset's sweep; the `cluster` stage uses this
// to replay a chosen cell bit-for-bit.
std::uint64_t cure_cell_seed(std::uint64_t master, std::int64_t duration_seconds, int rp,
                             double alpha);

// Rounds features to the 6-decimal instance CSV precision. run_all applies
// this right after computing or loading instances, so in-memory results match
// what any stage re-run from the persisted CSVs computes.
void quantize_features(std::vector<SBInstance>& instances);

// Stage artifact renderers. All output is byte-stable.
std::string render_stats_csv(const SubsetStats& stats);
SubsetStats parse_stats_csv(const std::string& path);
std::string render_silhouette_csv(const KSweepResult& result);
std::string render_best_k_csv(int best_k, double best_score);
std::string render_sweep_csv(const SweepResult& result, int target_k, int min_cluster_size);
std::string render_assignments_csv(const Subset& subset, const std::vector<CureCluster>& clusters);
std::string render_clusters_csv(const std::vector<CureCluster>& clusters);

struct SubsetRun {
  Subset subset;  // quantized features
  SubsetStats stats;
  KSweepResult ksweep;  // empty when the subset was too small to sweep
  int chosen_k = 1;
  SweepResult sweep;
};

struct RunResult {
  LabeledDataset labeled;
  std::vector<SubsetRun> subsets;
};

// Full pipeline: ingest -> features -> partition -> per subset
// {stats -> optimal k -> parameter sweep -> clustering} -> labeling ->
// reports. Every intermediate artifact is persisted under
// config.output_dir:
//   clean_bids.csv                     (bid-log input only)
//   instances.csv
//   subsets/<label>/instances.csv      (with duration_days column)
//   subsets/<label>/stats.csv
//   subsets/<label>/silhouette.csv, best_k.csv
//   subsets/<label>/sweep.csv, assignments.csv, clusters.csv
//   labeled.csv, summary.csv
//   reports/*.csv
// A stage failure leaves completed artifacts in place, writes a
// FAILED.partial marker naming stage, subset and cause, and raises
// StageError. Bit-reproducible in (input, config).
RunResult run_all(const PipelineConfig& config);

// Renders the merged report tables (stats, silhouette curves, sweep tables,
// summary) from a run directory into <run_dir>/reports. Tables whose stage
// artifacts are absent are skipped with a notice naming the stage; if the
// directory holds no artifacts at all, DataError.
std::vector<std::string> render_reports(const std::string& run_dir, std::ostream& notices);

}  // namespace sbl
