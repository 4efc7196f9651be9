#pragma once

#include <Eigen/Core>
#include <vector>

#include "fvn/rng.hpp"

namespace fvn {

struct VehicleState {
  int id = 0;
  Eigen::Vector2d position{0.0, 0.0};
  Eigen::Vector2d velocity{0.0, 0.0};  // m/s
  double p_t_max = 1.0;                // watts
  int shard_id = 0;
};

// Per-slot channel state: power gain g_n = h_n^2 and the maximum achievable
// received power p_t_max[n] * g_n for every vehicle, indexed by vehicle id.
struct ChannelSnapshot {
  long slot = 0;
  Eigen::VectorXd gains;
  Eigen::VectorXd p_r_max;
  double noise_power = 0.0;
};

// Constant-velocity motion wrapped torus-style into [0, arena_side)^2.
std::vector<VehicleState> advance_positions(const std::vector<VehicleState>& vehicles,
                                            double dt, double arena_side);

// Rayleigh fading power gain with pathloss: g = X * max(d, d_min)^(-alpha),
// X exponential with unit mean.
double sample_channel_gain(double distance, double pathloss_exponent, Rng& rng,
                           double d_min = 1.0);

ChannelSnapshot snapshot(const std::vector<VehicleState>& vehicles,
                         const Eigen::Vector2d& bs_position, double noise_power,
                         double pathloss_exponent, Rng& rng, long slot = 0);

// Uniform positions in the arena, headings uniform on the circle, speeds
// uniform in [speed_min, speed_max], budgets uniform in [p_min, p_max].
std::vector<VehicleState> make_fleet(int n, double arena_side, double p_min,
                                     double p_max, double speed_min,
                                     double speed_max, Rng& rng);

}  // namespace fvn
