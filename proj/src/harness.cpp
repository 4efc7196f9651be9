#include "fvn/harness.hpp"

#include <stdexcept>

namespace fvn {

namespace {

Eigen::VectorXd initial_weights(const ScenarioConfig& cfg, const Model& model,
                                std::uint64_t rep) {
  int dim = model.param_count(cfg.feature_dim, cfg.n_classes);
  if (cfg.model == "logistic") return Eigen::VectorXd::Zero(dim);
  // Hidden layers need symmetry breaking; keep the draw allocator-independent.
  Rng rng = make_rng(cfg.master_seed, Stream::model_init, rep);
  Eigen::VectorXd w(dim);
  for (int i = 0; i < dim; ++i) w[i] = 0.05 * (2.0 * uniform_unit(rng) - 1.0);
  return w;
}

std::vector<DataShard> partition_for(const ScenarioConfig& cfg, const Dataset& train,
                                     std::uint64_t rep) {
  Rng rng = make_rng(cfg.master_seed, Stream::partition, rep);
  if (cfg.partition == "dirichlet")
    return partition_dirichlet(train, cfg.n_vehicles, cfg.alpha_d, rng);
  return partition_iid(train, cfg.n_vehicles, rng);
}

}  // namespace

Allocator make_allocator(const std::string& name, double gamma, bool redistribute) {
  if (name == "nfl")
    return [gamma, redistribute](const ChannelSnapshot& s) {
      return select_and_allocate(s, gamma, redistribute);
    };
  if (name == "oma")
    return [gamma](const ChannelSnapshot& s) { return oma_select(s, gamma); };
  if (name == "fullset")
    return [gamma](const ChannelSnapshot& s) { return full_set_allocate(s, gamma); };
  if (name == "oracle")
    return [gamma](const ChannelSnapshot& s) { return oracle_max_selection(s, gamma); };
  throw ConfigError("unknown allocator '" + name + "'");
}

MetricsTable run_allocation_sweep(const ScenarioConfig& cfg,
                                  const std::vector<int>& n_vehicles_grid,
                                  const std::vector<std::string>& allocators) {
  if (n_vehicles_grid.empty())
    throw std::invalid_argument("run_allocation_sweep: empty grid");
  for (const std::string& a : allocators) {
    for (int n : n_vehicles_grid)
      if (a == "oracle" && n > 8)
        throw ConfigError("run_allocation_sweep: oracle requires n_vehicles <= 8");
  }

  MetricsTable table;
  for (int n : n_vehicles_grid) {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      Rng fleet_rng = make_rng(cfg.master_seed, Stream::fleet,
                               static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(rep));
      auto fleet = make_fleet(n, cfg.arena_side, cfg.p_t_max_min, cfg.p_t_max_max,
                              cfg.speed_min, cfg.speed_max, fleet_rng);
      Rng chan_rng = make_rng(cfg.master_seed, Stream::channel,
                              static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(rep));
      Eigen::Vector2d bs(cfg.arena_side / 2.0, cfg.arena_side / 2.0);
      ChannelSnapshot snap =
          snapshot(fleet, bs, cfg.noise_power, cfg.pathloss_exponent, chan_rng);
      for (const std::string& name : allocators) {
        SelectionResult sel =
            make_allocator(name, cfg.gamma, cfg.redistribute)(snap);
        MetricsRow row;
        row.replication = rep;
        row.round_or_n = n;
        row.allocator = name;
        row.m_t = sel.m_t;
        row.joining_ratio = sel.joining_ratio;
        table.rows.push_back(row);
      }
    }
  }
  normalize(table);
  return table;
}

MetricsTable run_fl_experiment(const ScenarioConfig& cfg,
                               const std::vector<std::string>& allocators) {
  validate_scenario(cfg);
  auto model = make_model(cfg.model, cfg.hidden_width);

  MetricsTable table;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    const auto urep = static_cast<std::uint64_t>(rep);
    // 75% train / 25% test split of a fresh synthetic task per replication.
    int train_n = cfg.n_vehicles * cfg.samples_per_client;
    int test_n = train_n / 3;
    Rng data_rng = make_rng(cfg.master_seed, Stream::dataset, urep);
    Dataset full = make_gaussian_mixture(train_n + test_n, cfg.feature_dim,
                                         cfg.n_classes, cfg.class_separation,
                                         data_rng);
    Dataset train{full.features.topRows(train_n), full.labels.head(train_n),
                  full.n_classes};
    Dataset test{full.features.bottomRows(test_n), full.labels.tail(test_n),
                 full.n_classes};
    auto shards = partition_for(cfg, train, urep);

    Rng fleet_rng = make_rng(cfg.master_seed, Stream::fleet, urep);
    auto fleet = make_fleet(cfg.n_vehicles, cfg.arena_side, cfg.p_t_max_min,
                            cfg.p_t_max_max, cfg.speed_min, cfg.speed_max,
                            fleet_rng);
    Eigen::Vector2d bs(cfg.arena_side / 2.0, cfg.arena_side / 2.0);

    NflConfig run_cfg;
    run_cfg.rounds = cfg.rounds;
    run_cfg.local_steps = cfg.local_steps;
    run_cfg.eta = cfg.eta;
    run_cfg.batch_size = cfg.batch_size;
    run_cfg.literal_step_scale = cfg.literal_step_scale;
    run_cfg.uniform_weights = cfg.uniform_weights;
    run_cfg.gamma = cfg.gamma;
    run_cfg.noise_power = cfg.noise_power;
    run_cfg.pathloss_exponent = cfg.pathloss_exponent;
    run_cfg.arena_side = cfg.arena_side;
    run_cfg.seed = derive_seed(cfg.master_seed, 0xF1u, urep);

    Eigen::VectorXd w0 = initial_weights(cfg, *model, urep);
    for (const std::string& name : allocators) {
      Allocator alloc = make_allocator(name, cfg.gamma, cfg.redistribute);
      auto trace = run_nfl(run_cfg, fleet, bs, alloc, *model, w0, shards, test);
      for (const RoundMetrics& m : trace) {
        MetricsRow row;
        row.replication = rep;
        row.round_or_n = m.round;
        row.allocator = name;
        row.m_t = m.m_t;
        row.joining_ratio = m.joining_ratio;
        row.train_loss = m.train_loss;
        row.test_accuracy = m.test_accuracy;
        table.rows.push_back(row);
      }
    }
  }
  normalize(table);
  return table;
}

}  // namespace fvn
