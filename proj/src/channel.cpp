#include "fvn/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fvn {

namespace {

double wrap(double x, double side) {
  double w = std::fmod(x, side);
  if (w < 0.0) w += side;
  return w;
}

}  // namespace

std::vector<VehicleState> advance_positions(const std::vector<VehicleState>& vehicles,
                                            double dt, double arena_side) {
  if (dt <= 0.0) throw std::invalid_argument("advance_positions: dt must be > 0");
  if (arena_side <= 0.0)
    throw std::invalid_argument("advance_positions: arena_side must be > 0");
  std::vector<VehicleState> out = vehicles;
  for (VehicleState& v : out) {
    v.position += v.velocity * dt;
    v.position.x() = wrap(v.position.x(), arena_side);
    v.position.y() = wrap(v.position.y(), arena_side);
  }
  return out;
}

double sample_channel_gain(double distance, double pathloss_exponent, Rng& rng,
                           double d_min) {
  if (pathloss_exponent <= 0.0)
    throw std::invalid_argument("sample_channel_gain: pathloss_exponent must be > 0");
  double d = std::max(distance, d_min);
  return exp_unit(rng) * std::pow(d, -pathloss_exponent);
}

ChannelSnapshot snapshot(const std::vector<VehicleState>& vehicles,
                         const Eigen::Vector2d& bs_position, double noise_power,
                         double pathloss_exponent, Rng& rng, long slot) {
  if (vehicles.empty()) throw std::invalid_argument("snapshot: no vehicles");
  if (noise_power <= 0.0)
    throw std::invalid_argument("snapshot: noise_power must be > 0");
  const auto n = static_cast<Eigen::Index>(vehicles.size());
  ChannelSnapshot snap;
  snap.slot = slot;
  snap.noise_power = noise_power;
  snap.gains.resize(n);
  snap.p_r_max.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = (vehicles[i].position - bs_position).norm();
    snap.gains[i] = sample_channel_gain(d, pathloss_exponent, rng);
    snap.p_r_max[i] = vehicles[i].p_t_max * snap.gains[i];
  }
  return snap;
}

std::vector<VehicleState> make_fleet(int n, double arena_side, double p_min,
                                     double p_max, double speed_min,
                                     double speed_max, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("make_fleet: n must be > 0");
  std::vector<VehicleState> fleet;
  fleet.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    VehicleState v;
    v.id = i;
    v.shard_id = i;
    v.position.x() = uniform_unit(rng) * arena_side;
    v.position.y() = uniform_unit(rng) * arena_side;
    double speed = speed_min + uniform_unit(rng) * (speed_max - speed_min);
    double heading = uniform_unit(rng) * 2.0 * M_PI;
    v.velocity = speed * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    v.p_t_max = p_min + uniform_unit(rng) * (p_max - p_min);
    fleet.push_back(v);
  }
  return fleet;
}

}  // namespace fvn
