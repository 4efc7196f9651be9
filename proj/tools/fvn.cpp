#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "fvn/harness.hpp"

namespace {

fvn::ScenarioConfig load_or_default(const std::string& path,
                                    std::optional<std::uint64_t> seed) {
  fvn::ScenarioConfig cfg;
  if (!path.empty()) cfg = fvn::load_scenario(path);
  if (seed) cfg.master_seed = *seed;
  return cfg;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_allocate(const fvn::ScenarioConfig& cfg) {
  fvn::Rng fleet_rng = fvn::make_rng(cfg.master_seed, fvn::Stream::fleet, 0);
  auto fleet = fvn::make_fleet(cfg.n_vehicles, cfg.arena_side, cfg.p_t_max_min,
                               cfg.p_t_max_max, cfg.speed_min, cfg.speed_max,
                               fleet_rng);
  fvn::Rng chan_rng = fvn::make_rng(cfg.master_seed, fvn::Stream::channel, 0);
  Eigen::Vector2d bs(cfg.arena_side / 2.0, cfg.arena_side / 2.0);
  fvn::ChannelSnapshot snap = fvn::snapshot(fleet, bs, cfg.noise_power,
                                            cfg.pathloss_exponent, chan_rng);
  fvn::SelectionResult sel =
      fvn::make_allocator(cfg.allocator, cfg.gamma, cfg.redistribute)(snap);

  nlohmann::ordered_json out = {
      {"allocator", cfg.allocator},
      {"n_vehicles", cfg.n_vehicles},
      {"m_t", sel.m_t},
      {"joining_ratio", sel.joining_ratio},
      {"selected", sel.selected},
      {"received_power", sel.allocation.received},
      {"transmit_power", sel.allocation.transmit},
      {"surplus", sel.allocation.surplus},
  };
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const fvn::ScenarioConfig& cfg, const std::string& out_path,
              const std::string& format, const std::vector<std::string>& allocators,
              int grid_min, int grid_max, int grid_step) {
  std::vector<int> grid;
  for (int n = grid_min; n <= grid_max; n += grid_step) grid.push_back(n);
  fvn::MetricsTable table = fvn::run_allocation_sweep(cfg, grid, allocators);
  if (!out_path.empty()) fvn::write_metrics(table, out_path, format);

  for (const fvn::SweepSummary& s : fvn::summarize_sweep(table)) {
    std::cout << "N=" << s.n_vehicles << " allocator=" << s.allocator
              << " mean_m_t=" << s.mean_m_t << " std_m_t=" << s.stddev_m_t
              << " outage=" << s.outage_fraction << "\n";
  }
  return 0;
}

int cmd_train(const fvn::ScenarioConfig& cfg, const std::string& out_path,
              const std::string& format, const std::vector<std::string>& allocators) {
  fvn::MetricsTable table = fvn::run_fl_experiment(cfg, allocators);
  if (!out_path.empty()) fvn::write_metrics(table, out_path, format);
  // Final-round summary per allocator.
  long last = 0;
  for (const auto& r : table.rows) last = std::max(last, r.round_or_n);
  for (const std::string& name : allocators) {
    double acc = 0.0, loss = 0.0;
    int count = 0;
    for (const auto& r : table.rows) {
      if (r.allocator == name && r.round_or_n == last && r.test_accuracy) {
        acc += *r.test_accuracy;
        loss += *r.train_loss;
        ++count;
      }
    }
    if (count > 0)
      std::cout << "allocator=" << name << " final_accuracy=" << acc / count
                << " final_train_loss=" << loss / count << "\n";
  }
  return 0;
}

int cmd_oracle_check(const fvn::ScenarioConfig& cfg, int instances) {
  int n = std::min(cfg.n_vehicles, 6);
  int equal = 0, violations = 0;
  for (int rep = 0; rep < instances; ++rep) {
    fvn::Rng fleet_rng = fvn::make_rng(cfg.master_seed, fvn::Stream::fleet,
                                       static_cast<std::uint64_t>(rep));
    auto fleet = fvn::make_fleet(n, cfg.arena_side, cfg.p_t_max_min,
                                 cfg.p_t_max_max, cfg.speed_min, cfg.speed_max,
                                 fleet_rng);
    fvn::Rng chan_rng = fvn::make_rng(cfg.master_seed, fvn::Stream::channel,
                                      static_cast<std::uint64_t>(rep));
    Eigen::Vector2d bs(cfg.arena_side / 2.0, cfg.arena_side / 2.0);
    auto snap = fvn::snapshot(fleet, bs, cfg.noise_power, cfg.pathloss_exponent,
                              chan_rng);
    auto greedy = fvn::select_and_allocate(snap, cfg.gamma, cfg.redistribute);
    auto oracle = fvn::oracle_max_selection(snap, cfg.gamma);
    if (greedy.m_t > oracle.m_t) ++violations;
    if (greedy.m_t == oracle.m_t) ++equal;
  }
  std::cout << "instances=" << instances << " n_vehicles=" << n
            << " greedy_equals_oracle=" << equal
            << " dominance_violations=" << violations << "\n";
  return violations == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOMA-enabled federated vehicular network simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv", allocators_csv;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "scenario file (key = value lines)");
  app.add_option("--seed", seed, "override master seed");

  auto* allocate = app.add_subcommand("allocate", "one snapshot, print the selection");

  auto* sweep = app.add_subcommand("sweep", "allocation sweep over vehicle counts");
  int grid_min = 10, grid_max = 80, grid_step = 10;
  sweep->add_option("--out", out_path, "metrics output path");
  sweep->add_option("--format", format, "csv|jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  sweep->add_option("--allocators", allocators_csv, "comma-separated allocator list");
  sweep->add_option("--grid-min", grid_min, "smallest vehicle count");
  sweep->add_option("--grid-max", grid_max, "largest vehicle count");
  sweep->add_option("--grid-step", grid_step, "vehicle count step");

  auto* train = app.add_subcommand("train", "federated training experiment");
  train->add_option("--out", out_path, "metrics output path");
  train->add_option("--format", format, "csv|jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  train->add_option("--allocators", allocators_csv, "comma-separated allocator list");

  auto* oracle_check = app.add_subcommand("oracle-check",
                                          "greedy vs exhaustive optimum audit");
  int instances = 500;
  oracle_check->add_option("--instances", instances, "random instances to test");

  CLI11_PARSE(app, argc, argv);

  try {
    fvn::ScenarioConfig cfg = load_or_default(config_path, seed);
    if (allocate->parsed()) return cmd_allocate(cfg);
    if (sweep->parsed()) {
      auto allocators = allocators_csv.empty()
                            ? std::vector<std::string>{"nfl", "oma", "fullset"}
                            : split_list(allocators_csv);
      return cmd_sweep(cfg, out_path, format, allocators, grid_min, grid_max,
                       grid_step);
    }
    if (train->parsed()) {
      auto allocators = allocators_csv.empty()
                            ? std::vector<std::string>{cfg.allocator}
                            : split_list(allocators_csv);
      return cmd_train(cfg, out_path, format, allocators);
    }
    if (oracle_check->parsed()) return cmd_oracle_check(cfg, instances);
  } catch (const fvn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
