#pragma once

#include <vector>

#include "fvn/channel.hpp"
#include "fvn/rng.hpp"

namespace fvn::test {

// Snapshot with explicit budgets; unit gains so received == transmit caps.
inline ChannelSnapshot snapshot_from_budgets(const std::vector<double>& p_r_max,
                                             double noise_power) {
  ChannelSnapshot snap;
  snap.noise_power = noise_power;
  snap.gains = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p_r_max.size()));
  snap.p_r_max.resize(static_cast<Eigen::Index>(p_r_max.size()));
  for (std::size_t i = 0; i < p_r_max.size(); ++i)
    snap.p_r_max[static_cast<Eigen::Index>(i)] = p_r_max[i];
  return snap;
}

// Random snapshot with budgets spanning several decades around the noise
// floor, the regime where selection decisions are nontrivial.
inline ChannelSnapshot random_snapshot(Rng& rng, int n, double noise_power) {
  ChannelSnapshot snap;
  snap.noise_power = noise_power;
  snap.gains.resize(n);
  snap.p_r_max.resize(n);
  for (int i = 0; i < n; ++i) {
    snap.gains[i] = std::pow(10.0, -3.0 + 3.0 * uniform_unit(rng));
    double budget = noise_power * std::pow(10.0, -1.0 + 5.0 * uniform_unit(rng));
    snap.p_r_max[i] = budget;
  }
  return snap;
}

}  // namespace fvn::test
