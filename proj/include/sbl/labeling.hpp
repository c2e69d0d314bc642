#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbl/cure.hpp"
#include "sbl/partition.hpp"

namespace sbl {

// Labeling threshold for a subset: avg_means + avg_stds / 2. A cluster whose
// grand mean reaches the line is suspicious.
double decision_line(const SubsetStats& stats);

// Mean over all members and all eight features.
double cluster_mean(const CureCluster& cluster, std::span<const SBInstance> instances);

// 1 (suspicious) iff cluster_mean >= decision_line(stats); the comparison is
// inclusive. `stats` must come from the cluster's own subset, computed before
// clustering.
int label_cluster(const CureCluster& cluster, std::span<const SBInstance> instances,
                  const SubsetStats& stats);

// One subset after clustering, with the statistics frozen beforehand.
struct ClusteredSubset {
  Subset subset;
  SubsetStats stats;
  std::vector<CureCluster> clusters;
  int rp = 0;
  double alpha = 0.0;
};

struct LabeledRow {
  std::string auction_id;
  std::string bidder_id;
  FeatureVector f{};
  double duration_days = 0.0;
  int cluster_id = 0;
  int label = 0;
};

struct SubsetSummary {
  std::string partition;  // subset label, e.g. "7d"
  int auctions = 0;
  int instances = 0;
  int clusters = 0;
  int rp = 0;          // -1 renders as NA (totals row)
  double alpha = 0.0;  // ignored when rp == -1
  int normal = 0;
  int suspicious = 0;
};

struct LabeledDataset {
  std::vector<LabeledRow> rows;          // ordered by (auction_id, bidder_id)
  std::vector<SubsetSummary> summary;    // one row per subset, input order
};

// Applies label_cluster per cluster and assembles rows plus the per-subset
// summary. Every instance must be covered by exactly one cluster, otherwise
// DataError.
LabeledDataset label_dataset(const std::vector<ClusteredSubset>& subsets);

// Enforces the summary arithmetic: counts non-negative and
// normal + suspicious == instances in every row. Throws DataError.
void validate_summary(std::span<const SubsetSummary> summary);

// Totals row across subsets (rp = -1 marks the NA columns).
SubsetSummary summarize_total(std::span<const SubsetSummary> summary);

// Labeled CSV:
//   auction_id,bidder_id,bt,br,so,lb,eb,wr,ab,asp,duration_days,cluster_id,label
extern const char* const kLabeledCsvHeader;
// Summary CSV: partition,auctions,instances,clusters,rp,alpha,normal,suspicious
extern const char* const kSummaryCsvHeader;

std::string render_labeled_csv(const LabeledDataset& labeled);
std::string render_summary_csv(const LabeledDataset& labeled);

}  // namespace sbl
