#include "fvn/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fvn {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out;
  in >> out;
  if (in.fail() || !in.eof())
    throw ConfigError("config: bad value for '" + key + "': " + value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config: bad boolean for '" + key + "': " + value);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"n_vehicles", [&](auto& k, auto& v) { cfg.n_vehicles = parse_number<int>(k, v); }},
          {"gamma", [&](auto& k, auto& v) { cfg.gamma = parse_number<double>(k, v); }},
          {"noise_power", [&](auto& k, auto& v) { cfg.noise_power = parse_number<double>(k, v); }},
          {"p_t_max_min", [&](auto& k, auto& v) { cfg.p_t_max_min = parse_number<double>(k, v); }},
          {"p_t_max_max", [&](auto& k, auto& v) { cfg.p_t_max_max = parse_number<double>(k, v); }},
          {"speed_min", [&](auto& k, auto& v) { cfg.speed_min = parse_number<double>(k, v); }},
          {"speed_max", [&](auto& k, auto& v) { cfg.speed_max = parse_number<double>(k, v); }},
          {"arena_side", [&](auto& k, auto& v) { cfg.arena_side = parse_number<double>(k, v); }},
          {"pathloss_exponent", [&](auto& k, auto& v) { cfg.pathloss_exponent = parse_number<double>(k, v); }},
          {"rounds", [&](auto& k, auto& v) { cfg.rounds = parse_number<long>(k, v); }},
          {"local_steps", [&](auto& k, auto& v) { cfg.local_steps = parse_number<int>(k, v); }},
          {"eta", [&](auto& k, auto& v) { cfg.eta = parse_number<double>(k, v); }},
          {"batch_size", [&](auto& k, auto& v) { cfg.batch_size = parse_number<int>(k, v); }},
          {"partition", [&](auto&, auto& v) { cfg.partition = v; }},
          {"alpha_d", [&](auto& k, auto& v) { cfg.alpha_d = parse_number<double>(k, v); }},
          {"allocator", [&](auto&, auto& v) { cfg.allocator = v; }},
          {"master_seed", [&](auto& k, auto& v) { cfg.master_seed = parse_number<std::uint64_t>(k, v); }},
          {"replications", [&](auto& k, auto& v) { cfg.replications = parse_number<int>(k, v); }},
          {"redistribute", [&](auto& k, auto& v) { cfg.redistribute = parse_bool(k, v); }},
          {"model", [&](auto&, auto& v) { cfg.model = v; }},
          {"hidden_width", [&](auto& k, auto& v) { cfg.hidden_width = parse_number<int>(k, v); }},
          {"feature_dim", [&](auto& k, auto& v) { cfg.feature_dim = parse_number<int>(k, v); }},
          {"n_classes", [&](auto& k, auto& v) { cfg.n_classes = parse_number<int>(k, v); }},
          {"samples_per_client", [&](auto& k, auto& v) { cfg.samples_per_client = parse_number<int>(k, v); }},
          {"class_separation", [&](auto& k, auto& v) { cfg.class_separation = parse_number<double>(k, v); }},
          {"literal_step_scale", [&](auto& k, auto& v) { cfg.literal_step_scale = parse_bool(k, v); }},
          {"uniform_weights", [&](auto& k, auto& v) { cfg.uniform_weights = parse_bool(k, v); }},
      };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(key, value);
  }
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void validate_scenario(const ScenarioConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("config: '") + name + "' must be > 0");
  };
  positive(cfg.n_vehicles, "n_vehicles");
  positive(cfg.gamma, "gamma");
  positive(cfg.noise_power, "noise_power");
  positive(cfg.p_t_max_min, "p_t_max_min");
  positive(cfg.p_t_max_max, "p_t_max_max");
  positive(cfg.arena_side, "arena_side");
  positive(cfg.pathloss_exponent, "pathloss_exponent");
  positive(static_cast<double>(cfg.rounds), "rounds");
  positive(cfg.local_steps, "local_steps");
  positive(cfg.eta, "eta");
  positive(cfg.alpha_d, "alpha_d");
  positive(cfg.feature_dim, "feature_dim");
  positive(cfg.samples_per_client, "samples_per_client");
  positive(cfg.class_separation, "class_separation");
  if (cfg.speed_min < 0.0 || cfg.speed_max < cfg.speed_min)
    throw ConfigError("config: 'speed_min'/'speed_max' must satisfy 0 <= min <= max");
  if (cfg.p_t_max_max < cfg.p_t_max_min)
    throw ConfigError("config: 'p_t_max_max' must be >= 'p_t_max_min'");
  if (cfg.replications < 1) throw ConfigError("config: 'replications' must be >= 1");
  if (cfg.n_classes < 2) throw ConfigError("config: 'n_classes' must be >= 2");
  if (cfg.hidden_width < 1) throw ConfigError("config: 'hidden_width' must be >= 1");
  if (cfg.partition != "iid" && cfg.partition != "dirichlet")
    throw ConfigError("config: 'partition' must be iid or dirichlet");
  if (cfg.allocator != "nfl" && cfg.allocator != "oma" &&
      cfg.allocator != "fullset" && cfg.allocator != "oracle")
    throw ConfigError("config: 'allocator' must be one of nfl|oma|fullset|oracle");
  if (cfg.allocator == "oracle" && cfg.n_vehicles > 8)
    throw ConfigError("config: 'allocator' = oracle requires n_vehicles <= 8");
  if (cfg.model != "logistic" && cfg.model != "mlp")
    throw ConfigError("config: 'model' must be logistic or mlp");
}

}  // namespace fvn
