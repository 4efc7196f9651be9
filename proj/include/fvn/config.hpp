#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvn {

// Thrown on malformed or invalid scenario files; the message names the
// offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int n_vehicles = 80;
  double gamma = 1.0;
  double noise_power = 5e-12;
  double p_t_max_min = 0.1;
  double p_t_max_max = 1.0;
  double speed_min = 5.0;
  double speed_max = 20.0;
  double arena_side = 2000.0;
  double pathloss_exponent = 3.0;
  long rounds = 500;
  int local_steps = 5;
  double eta = 0.05;
  int batch_size = 32;
  std::string partition = "iid";  // iid | dirichlet
  double alpha_d = 0.4;
  std::string allocator = "nfl";  // nfl | oma | fullset | oracle
  std::uint64_t master_seed = 1;
  int replications = 1;
  bool redistribute = true;
  std::string model = "logistic";  // logistic | mlp
  int hidden_width = 32;
  int feature_dim = 32;
  int n_classes = 10;
  int samples_per_client = 200;
  double class_separation = 1.0;
  bool literal_step_scale = true;
  bool uniform_weights = false;
};

// Flat key = value format, '#' comments, strict unknown-key rejection.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
void validate_scenario(const ScenarioConfig& cfg);

}  // namespace fvn
