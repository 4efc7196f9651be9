#pragma once

#include <string>
#include <vector>

#include "fvn/config.hpp"
#include "fvn/fl.hpp"
#include "fvn/metrics.hpp"

namespace fvn {

Allocator make_allocator(const std::string& name, double gamma, bool redistribute);

// One snapshot + allocation per (N, replication); every allocator in the list
// sees the identical snapshot, so comparisons are paired.
MetricsTable run_allocation_sweep(const ScenarioConfig& cfg,
                                  const std::vector<int>& n_vehicles_grid,
                                  const std::vector<std::string>& allocators);

// Full FL traces per replication per allocator. Channels are derived from
// (master_seed, replication, round) only, so allocators are paired here too.
MetricsTable run_fl_experiment(const ScenarioConfig& cfg,
                               const std::vector<std::string>& allocators);

}  // namespace fvn
