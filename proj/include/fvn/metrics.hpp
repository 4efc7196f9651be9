#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fvn {

// One row per (replication, round-or-N, allocator). Sweep rows leave the FL
// fields empty.
struct MetricsRow {
  int replication = 0;
  long round_or_n = 0;
  std::string allocator;
  int m_t = 0;
  double joining_ratio = 0.0;
  std::optional<double> train_loss;
  std::optional<double> test_accuracy;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
};

struct SweepSummary {
  long n_vehicles = 0;
  std::string allocator;
  double mean_m_t = 0.0;
  double stddev_m_t = 0.0;
  double outage_fraction = 0.0;  // share of replications with m_t == 0
  double mean_joining_ratio = 0.0;
};

// Sort rows on (allocator, round_or_n, replication) so parallel producers
// never change output bytes.
void normalize(MetricsTable& table);

std::vector<SweepSummary> summarize_sweep(const MetricsTable& table);

// format: "csv" or "jsonl". Columns/keys exactly
// replication,round_or_n,allocator,m_t,joining_ratio,train_loss,test_accuracy
// with numbers rendered at 17 significant digits.
void write_metrics(const MetricsTable& table, const std::string& path,
                   const std::string& format);
MetricsTable read_metrics_csv(const std::string& path);

}  // namespace fvn
