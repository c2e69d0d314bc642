#include "sbl/labeling.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "sbl/csv.hpp"
#include "sbl/errors.hpp"

namespace sbl {

const char* const kLabeledCsvHeader =
    "auction_id,bidder_id,bt,br,so,lb,eb,wr,ab,asp,duration_days,cluster_id,label";
const char* const kSummaryCsvHeader =
    "partition,auctions,instances,clusters,rp,alpha,normal,suspicious";

double decision_line(const SubsetStats& stats) { return stats.avg_means + stats.avg_stds / 2.0; }

double cluster_mean(const CureCluster& cluster, std::span<const SBInstance> instances) {
  if (cluster.members.empty()) throw std::invalid_argument("cluster_mean: empty cluster");
  double total = 0.0;
  for (int idx : cluster.members) {
    const SBInstance& inst = instances[static_cast<std::size_t>(idx)];
    for (double v : inst.f) total += v;
  }
  return total / (static_cast<double>(cluster.members.size()) * kNumFeatures);
}

int label_cluster(const CureCluster& cluster, std::span<const SBInstance> instances,
                  const SubsetStats& stats) {
  return cluster_mean(cluster, instances) >= decision_line(stats) ? 1 : 0;
}

LabeledDataset label_dataset(const std::vector<ClusteredSubset>& subsets) {
  LabeledDataset out;
  for (const ClusteredSubset& cs : subsets) {
    const std::size_t n = cs.subset.instances.size();
    std::vector<int> cluster_of(n, -1);
    std::vector<int> labels(cs.clusters.size());
    for (std::size_t c = 0; c < cs.clusters.size(); ++c) {
      labels[c] = label_cluster(cs.clusters[c], cs.subset.instances, cs.stats);
      for (int idx : cs.clusters[c].members) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n)
          throw DataError("cluster member index out of range in subset " +
                          subset_label(cs.subset.duration_seconds));
        if (cluster_of[static_cast<std::size_t>(idx)] != -1)
          throw DataError("instance assigned to two clusters in subset " +
                          subset_label(cs.subset.duration_seconds));
        cluster_of[static_cast<std::size_t>(idx)] = static_cast<int>(c);
      }
    }

    SubsetSummary summary;
    summary.partition = subset_label(cs.subset.duration_seconds);
    summary.instances = static_cast<int>(n);
    summary.clusters = static_cast<int>(cs.clusters.size());
    summary.rp = cs.rp;
    summary.alpha = cs.alpha;
    std::set<std::string> auctions;

    for (std::size_t i = 0; i < n; ++i) {
      if (cluster_of[i] == -1)
        throw DataError("instance " + cs.subset.instances[i].auction_id + "/" +
                        cs.subset.instances[i].bidder_id + " has no cluster assignment");
      const SBInstance& inst = cs.subset.instances[i];
      LabeledRow row;
      row.auction_id = inst.auction_id;
      row.bidder_id = inst.bidder_id;
      row.f = inst.f;
      row.duration_days = cs.subset.duration_days;
      row.cluster_id = cluster_of[i];
      row.label = labels[static_cast<std::size_t>(cluster_of[i])];
      if (row.label == 1)
        summary.suspicious += 1;
      else
        summary.normal += 1;
      auctions.insert(inst.auction_id);
      out.rows.push_back(std::move(row));
    }
    summary.auctions = static_cast<int>(auctions.size());
    out.summary.push_back(std::move(summary));
  }

  std::sort(out.rows.begin(), out.rows.end(), [](const LabeledRow& a, const LabeledRow& b) {
    if (a.auction_id != b.auction_id) return a.auction_id < b.auction_id;
    return a.bidder_id < b.bidder_id;
  });
  validate_summary(out.summary);
  return out;
}

void validate_summary(std::span<const SubsetSummary> summary) {
  for (const SubsetSummary& s : summary) {
    if (s.normal < 0 || s.suspicious < 0 || s.instances < 0)
      throw DataError("summary row " + s.partition + " has negative counts");
    if (s.normal + s.suspicious != s.instances)
      throw DataError("summary row " + s.partition + ": normal " + std::to_string(s.normal) +
                      " + suspicious " + std::to_string(s.suspicious) + " != instances " +
                      std::to_string(s.instances));
  }
}

SubsetSummary summarize_total(std::span<const SubsetSummary> summary) {
  SubsetSummary total;
  total.partition = "total";
  total.rp = -1;
  for (const SubsetSummary& s : summary) {
    total.auctions += s.auctions;
    total.instances += s.instances;
    total.clusters += s.clusters;
    total.normal += s.normal;
    total.suspicious += s.suspicious;
  }
  return total;
}

std::string render_labeled_csv(const LabeledDataset& labeled) {
  std::string out(kLabeledCsvHeader);
  out += '\n';
  for (const LabeledRow& r : labeled.rows) {
    out += r.auction_id;
    out += ',';
    out += r.bidder_id;
    for (double v : r.f) {
      out += ',';
      out += fmt_fixed(v, 6);
    }
    out += ',';
    out += fmt_days(r.duration_days);
    out += ',';
    out += std::to_string(r.cluster_id);
    out += ',';
    out += std::to_string(r.label);
    out += '\n';
  }
  return out;
}

namespace {

void append_summary_row(std::string& out, const SubsetSummary& s) {
  out += s.partition;
  out += ',';
  out += std::to_string(s.auctions);
  out += ',';
  out += std::to_string(s.instances);
  out += ',';
  out += std::to_string(s.clusters);
  out += ',';
  if (s.rp < 0) {
    out += "NA,NA";
  } else {
    out += std::to_string(s.rp);
    out += ',';
    out += fmt_shortest(s.alpha);
  }
  out += ',';
  out += std::to_string(s.normal);
  out += ',';
  out += std::to_string(s.suspicious);
  out += '\n';
}

}  // namespace

std::string render_summary_csv(const LabeledDataset& labeled) {
  validate_summary(labeled.summary);
  std::string out(kSummaryCsvHeader);
  out += '\n';
  for (const SubsetSummary& s : labeled.summary) append_summary_row(out, s);
  append_summary_row(out, summarize_total(labeled.summary));
  return out;
}

}  // namespace sbl
