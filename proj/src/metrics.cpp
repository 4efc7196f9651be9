#include "fvn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace fvn {

namespace {

std::string render(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void normalize(MetricsTable& table) {
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const MetricsRow& a, const MetricsRow& b) {
                     if (a.allocator != b.allocator) return a.allocator < b.allocator;
                     if (a.round_or_n != b.round_or_n) return a.round_or_n < b.round_or_n;
                     return a.replication < b.replication;
                   });
}

std::vector<SweepSummary> summarize_sweep(const MetricsTable& table) {
  std::map<std::pair<long, std::string>, std::vector<const MetricsRow*>> groups;
  for (const MetricsRow& row : table.rows)
    groups[{row.round_or_n, row.allocator}].push_back(&row);

  std::vector<SweepSummary> out;
  for (const auto& [key, rows] : groups) {
    SweepSummary s;
    s.n_vehicles = key.first;
    s.allocator = key.second;
    double n = static_cast<double>(rows.size());
    double sum = 0.0, sum_jr = 0.0;
    int outages = 0;
    for (const MetricsRow* r : rows) {
      sum += r->m_t;
      sum_jr += r->joining_ratio;
      if (r->m_t == 0) ++outages;
    }
    s.mean_m_t = sum / n;
    s.mean_joining_ratio = sum_jr / n;
    s.outage_fraction = static_cast<double>(outages) / n;
    double ss = 0.0;
    for (const MetricsRow* r : rows) {
      double d = r->m_t - s.mean_m_t;
      ss += d * d;
    }
    s.stddev_m_t = std::sqrt(ss / n);
    out.push_back(s);
  }
  return out;
}

void write_metrics(const MetricsTable& table, const std::string& path,
                   const std::string& format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_metrics: cannot open '" + path + "'");
  if (format == "csv") {
    out << "replication,round_or_n,allocator,m_t,joining_ratio,train_loss,test_accuracy\n";
    for (const MetricsRow& r : table.rows) {
      out << r.replication << ',' << r.round_or_n << ',' << r.allocator << ','
          << r.m_t << ',' << render(r.joining_ratio) << ','
          << (r.train_loss ? render(*r.train_loss) : "") << ','
          << (r.test_accuracy ? render(*r.test_accuracy) : "") << '\n';
    }
  } else if (format == "jsonl") {
    for (const MetricsRow& r : table.rows) {
      nlohmann::ordered_json obj = {
          {"replication", r.replication},
          {"round_or_n", r.round_or_n},
          {"allocator", r.allocator},
          {"m_t", r.m_t},
          {"joining_ratio", r.joining_ratio},
          {"train_loss", r.train_loss ? nlohmann::json(*r.train_loss)
                                      : nlohmann::json(nullptr)},
          {"test_accuracy", r.test_accuracy ? nlohmann::json(*r.test_accuracy)
                                            : nlohmann::json(nullptr)},
      };
      out << obj.dump() << '\n';
    }
  } else {
    throw std::runtime_error("write_metrics: unknown format '" + format + "'");
  }
  if (!out) throw std::runtime_error("write_metrics: write failed for '" + path + "'");
}

MetricsTable read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_metrics_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_metrics_csv: missing header");
  MetricsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 7)
      throw std::runtime_error("read_metrics_csv: malformed row: " + line);
    MetricsRow r;
    r.replication = std::stoi(f[0]);
    r.round_or_n = std::stol(f[1]);
    r.allocator = f[2];
    r.m_t = std::stoi(f[3]);
    r.joining_ratio = std::stod(f[4]);
    if (!f[5].empty()) r.train_loss = std::stod(f[5]);
    if (!f[6].empty()) r.test_accuracy = std::stod(f[6]);
    table.rows.push_back(r);
  }
  return table;
}

}  // namespace fvn
