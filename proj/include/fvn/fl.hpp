#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fvn/allocation.hpp"
#include "fvn/channel.hpp"
#include "fvn/rng.hpp"

namespace fvn {

struct Dataset {
  Eigen::MatrixXd features;  // samples x features
  Eigen::VectorXi labels;    // values in {0..n_classes-1}
  int n_classes = 0;
};

struct DataShard {
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;
};

struct RoundMetrics {
  long round = 0;
  int m_t = 0;
  double joining_ratio = 0.0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
};

// Differentiable model family over flat parameter vectors.
class Model {
 public:
  virtual ~Model() = default;
  virtual int param_count(int n_features, int n_classes) const = 0;
  // Mean cross-entropy loss over the rows of X and its exact gradient.
  virtual std::pair<double, Eigen::VectorXd> loss_and_gradient(
      const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
      const Eigen::VectorXi& y, int n_classes) const = 0;
  virtual Eigen::VectorXi predict(const Eigen::VectorXd& w,
                                  const Eigen::MatrixXd& X,
                                  int n_classes) const = 0;
};

// Multinomial logistic regression with bias.
class LogisticModel final : public Model {
 public:
  int param_count(int n_features, int n_classes) const override;
  std::pair<double, Eigen::VectorXd> loss_and_gradient(
      const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
      const Eigen::VectorXi& y, int n_classes) const override;
  Eigen::VectorXi predict(const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
                          int n_classes) const override;
};

// One hidden tanh layer.
class MlpModel final : public Model {
 public:
  explicit MlpModel(int hidden_width = 32) : hidden_(hidden_width) {}
  int param_count(int n_features, int n_classes) const override;
  std::pair<double, Eigen::VectorXd> loss_and_gradient(
      const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
      const Eigen::VectorXi& y, int n_classes) const override;
  Eigen::VectorXi predict(const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
                          int n_classes) const override;

 private:
  int hidden_;
};

std::unique_ptr<Model> make_model(const std::string& name, int hidden_width = 32);

std::vector<DataShard> partition_iid(const Dataset& dataset, int n_clients,
                                     Rng& rng);
// Per-class Dirichlet(alpha_d) proportions with largest-remainder rounding;
// empty shards are repaired by moving one sample from the largest shard.
std::vector<DataShard> partition_dirichlet(const Dataset& dataset, int n_clients,
                                           double alpha_d, Rng& rng);

std::pair<double, Eigen::VectorXd> loss_and_gradient(
    const Model& model, const Eigen::VectorXd& w, const DataShard& shard,
    const std::vector<int>& batch_indices, int n_classes);

// tau_star SGD steps w <- w - (eta/k_n) * grad(batch); batch_size <= 0 or
// >= k_n means full batch, otherwise uniform with replacement. Setting
// literal_step_scale=false drops the 1/k_n factor (plain SGD).
Eigen::VectorXd local_update(const Model& model, Eigen::VectorXd w,
                             const DataShard& shard, int n_classes, double eta,
                             int tau_star, int batch_size, Rng& rng,
                             bool literal_step_scale = true);

Eigen::VectorXd aggregate(const std::vector<Eigen::VectorXd>& models,
                          const std::vector<double>& alphas);

// Synthetic labelled Gaussian-mixture task.
Dataset make_gaussian_mixture(int n_samples, int n_features, int n_classes,
                              double separation, Rng& rng);

double accuracy(const Model& model, const Eigen::VectorXd& w,
                const Dataset& test_set);

struct NflConfig {
  long rounds = 100;
  int local_steps = 5;
  double eta = 0.05;
  int batch_size = 32;
  bool literal_step_scale = true;
  bool uniform_weights = false;
  double gamma = 1.0;
  double noise_power = 5e-12;
  double pathloss_exponent = 3.0;
  double arena_side = 2000.0;
  double slot_dt = 1.0;
  std::uint64_t seed = 0;  // base for all per-round derived streams
};

using Allocator = std::function<SelectionResult(const ChannelSnapshot&)>;

// Federated training loop: per round advance mobility, draw a channel
// snapshot, let the allocator pick the participant set, run local SGD on each
// participant, aggregate with alpha_n = k_n / sum k, and record metrics.
// Rounds with an empty selection carry the global model forward.
std::vector<RoundMetrics> run_nfl(const NflConfig& cfg,
                                  std::vector<VehicleState> vehicles,
                                  const Eigen::Vector2d& bs_position,
                                  const Allocator& allocator, const Model& model,
                                  Eigen::VectorXd init_weights,
                                  const std::vector<DataShard>& shards,
                                  const Dataset& test_set);

}  // namespace fvn
