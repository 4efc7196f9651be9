#include "fvn/fl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fvn {

namespace {

double normal_unit(Rng& rng) {
  // Box-Muller from explicit uniform bits.
  double u1 = 1.0 - uniform_unit(rng);
  double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Row-wise softmax cross entropy; returns mean loss and fills dlogits with
// (softmax - onehot)/B.
double softmax_xent(const Eigen::MatrixXd& logits, const Eigen::VectorXi& y,
                    Eigen::MatrixXd& dlogits) {
  const Eigen::Index b = logits.rows();
  dlogits.resize(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    Eigen::RowVectorXd row = logits.row(i);
    double m = row.maxCoeff();
    Eigen::RowVectorXd e = (row.array() - m).exp();
    double z = e.sum();
    Eigen::RowVectorXd p = e / z;
    loss += -(std::log(p[y[i]]));
    dlogits.row(i) = p;
    dlogits(i, y[i]) -= 1.0;
  }
  dlogits /= static_cast<double>(b);
  return loss / static_cast<double>(b);
}

std::vector<int> shuffled_indices(Eigen::Index n, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

DataShard gather(const Dataset& ds, const std::vector<int>& rows) {
  DataShard s;
  s.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  s.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
    s.labels[static_cast<Eigen::Index>(i)] = ds.labels[rows[i]];
  }
  return s;
}

}  // namespace

int LogisticModel::param_count(int n_features, int n_classes) const {
  return n_classes * n_features + n_classes;
}

std::pair<double, Eigen::VectorXd> LogisticModel::loss_and_gradient(
    const Eigen::VectorXd& w, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
    int n_classes) const {
  const Eigen::Index d = X.cols();
  const Eigen::Index c = n_classes;
  if (w.size() != param_count(static_cast<int>(d), n_classes))
    throw std::invalid_argument("LogisticModel: parameter/feature dimension mismatch");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      W(w.data(), c, d);
  Eigen::Map<const Eigen::VectorXd> bias(w.data() + c * d, c);

  Eigen::MatrixXd logits = (X * W.transpose()).rowwise() + bias.transpose();
  Eigen::MatrixXd dlogits;
  double loss = softmax_xent(logits, y, dlogits);

  Eigen::VectorXd grad(w.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>
      gW(grad.data(), c, d);
  Eigen::Map<Eigen::VectorXd> gb(grad.data() + c * d, c);
  gW = dlogits.transpose() * X;
  gb = dlogits.colwise().sum().transpose();
  return {loss, grad};
}

Eigen::VectorXi LogisticModel::predict(const Eigen::VectorXd& w,
                                       const Eigen::MatrixXd& X,
                                       int n_classes) const {
  const Eigen::Index d = X.cols();
  const Eigen::Index c = n_classes;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      W(w.data(), c, d);
  Eigen::Map<const Eigen::VectorXd> bias(w.data() + c * d, c);
  Eigen::MatrixXd logits = (X * W.transpose()).rowwise() + bias.transpose();
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index best;
    logits.row(i).maxCoeff(&best);
    out[i] = static_cast<int>(best);
  }
  return out;
}

int MlpModel::param_count(int n_features, int n_classes) const {
  return hidden_ * n_features + hidden_ + n_classes * hidden_ + n_classes;
}

std::pair<double, Eigen::VectorXd> MlpModel::loss_and_gradient(
    const Eigen::VectorXd& w, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
    int n_classes) const {
  const Eigen::Index d = X.cols();
  const Eigen::Index h = hidden_;
  const Eigen::Index c = n_classes;
  if (w.size() != param_count(static_cast<int>(d), n_classes))
    throw std::invalid_argument("MlpModel: parameter/feature dimension mismatch");
  const double* p = w.data();
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> W1(p, h, d);
  Eigen::Map<const Eigen::VectorXd> b1(p + h * d, h);
  Eigen::Map<const RowMat> W2(p + h * d + h, c, h);
  Eigen::Map<const Eigen::VectorXd> b2(p + h * d + h + c * h, c);

  Eigen::MatrixXd hidden =
      (((X * W1.transpose()).rowwise() + b1.transpose()).array().tanh()).matrix();
  Eigen::MatrixXd logits = (hidden * W2.transpose()).rowwise() + b2.transpose();
  Eigen::MatrixXd dlogits;
  double loss = softmax_xent(logits, y, dlogits);

  Eigen::VectorXd grad(w.size());
  double* g = grad.data();
  Eigen::Map<RowMat> gW1(g, h, d);
  Eigen::Map<Eigen::VectorXd> gb1(g + h * d, h);
  Eigen::Map<RowMat> gW2(g + h * d + h, c, h);
  Eigen::Map<Eigen::VectorXd> gb2(g + h * d + h + c * h, c);

  gW2 = dlogits.transpose() * hidden;
  gb2 = dlogits.colwise().sum().transpose();
  Eigen::MatrixXd dhidden =
      (dlogits * W2).cwiseProduct((1.0 - hidden.array().square()).matrix());
  gW1 = dhidden.transpose() * X;
  gb1 = dhidden.colwise().sum().transpose();
  return {loss, grad};
}

Eigen::VectorXi MlpModel::predict(const Eigen::VectorXd& w,
                                  const Eigen::MatrixXd& X, int n_classes) const {
  const Eigen::Index d = X.cols();
  const Eigen::Index h = hidden_;
  const Eigen::Index c = n_classes;
  const double* p = w.data();
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> W1(p, h, d);
  Eigen::Map<const Eigen::VectorXd> b1(p + h * d, h);
  Eigen::Map<const RowMat> W2(p + h * d + h, c, h);
  Eigen::Map<const Eigen::VectorXd> b2(p + h * d + h + c * h, c);
  Eigen::MatrixXd hidden =
      (((X * W1.transpose()).rowwise() + b1.transpose()).array().tanh()).matrix();
  Eigen::MatrixXd logits = (hidden * W2.transpose()).rowwise() + b2.transpose();
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index best;
    logits.row(i).maxCoeff(&best);
    out[i] = static_cast<int>(best);
  }
  return out;
}

std::unique_ptr<Model> make_model(const std::string& name, int hidden_width) {
  if (name == "logistic") return std::make_unique<LogisticModel>();
  if (name == "mlp") return std::make_unique<MlpModel>(hidden_width);
  throw std::invalid_argument("make_model: unknown model family '" + name + "'");
}

std::vector<DataShard> partition_iid(const Dataset& dataset, int n_clients,
                                     Rng& rng) {
  const Eigen::Index n = dataset.features.rows();
  if (n_clients < 1 || n < n_clients)
    throw std::invalid_argument("partition_iid: need at least one sample per client");
  std::vector<int> perm = shuffled_indices(n, rng);
  std::vector<DataShard> shards;
  shards.reserve(static_cast<std::size_t>(n_clients));
  Eigen::Index base = n / n_clients;
  Eigen::Index extra = n % n_clients;
  std::size_t pos = 0;
  for (int cl = 0; cl < n_clients; ++cl) {
    Eigen::Index size = base + (cl < extra ? 1 : 0);
    std::vector<int> rows(perm.begin() + pos, perm.begin() + pos + size);
    pos += static_cast<std::size_t>(size);
    shards.push_back(gather(dataset, rows));
  }
  return shards;
}

std::vector<DataShard> partition_dirichlet(const Dataset& dataset, int n_clients,
                                           double alpha_d, Rng& rng) {
  if (alpha_d <= 0.0)
    throw std::invalid_argument("partition_dirichlet: alpha_d must be > 0");
  const Eigen::Index n = dataset.features.rows();
  if (n_clients < 1 || n < n_clients)
    throw std::invalid_argument("partition_dirichlet: need at least one sample per client");

  std::vector<std::vector<int>> assigned(static_cast<std::size_t>(n_clients));
  std::gamma_distribution<double> gamma_draw(alpha_d, 1.0);

  for (int c = 0; c < dataset.n_classes; ++c) {
    std::vector<int> rows;
    for (Eigen::Index i = 0; i < n; ++i)
      if (dataset.labels[i] == c) rows.push_back(static_cast<int>(i));
    if (rows.empty()) continue;
    // Shuffle within the class so chunk boundaries are random.
    for (std::size_t i = rows.size(); i > 1; --i)
      std::swap(rows[i - 1], rows[static_cast<std::size_t>(rng() % i)]);

    std::vector<double> props(static_cast<std::size_t>(n_clients));
    double total = 0.0;
    for (double& p : props) {
      p = gamma_draw(rng);
      total += p;
    }
    if (total <= 0.0) {
      props.assign(props.size(), 1.0);
      total = static_cast<double>(n_clients);
    }
    // Largest-remainder rounding of per-client quotas.
    std::vector<int> counts(props.size());
    std::vector<std::pair<double, int>> remainders;
    int used = 0;
    for (int cl = 0; cl < n_clients; ++cl) {
      double quota = props[cl] / total * static_cast<double>(rows.size());
      counts[cl] = static_cast<int>(std::floor(quota));
      used += counts[cl];
      remainders.emplace_back(quota - std::floor(quota), cl);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < static_cast<int>(rows.size()) - used; ++k)
      ++counts[remainders[static_cast<std::size_t>(k)].second];

    std::size_t pos = 0;
    for (int cl = 0; cl < n_clients; ++cl) {
      for (int k = 0; k < counts[cl]; ++k) assigned[cl].push_back(rows[pos++]);
    }
  }

  // Repair empty shards by moving one sample from the currently largest shard.
  for (auto& shard_rows : assigned) {
    while (shard_rows.empty()) {
      auto largest = std::max_element(
          assigned.begin(), assigned.end(),
          [](const auto& a, const auto& b) { return a.size() < b.size(); });
      if (largest->size() <= 1)
        throw std::runtime_error("partition_dirichlet: cannot repair empty shard");
      shard_rows.push_back(largest->back());
      largest->pop_back();
    }
  }

  std::vector<DataShard> shards;
  shards.reserve(assigned.size());
  for (const auto& rows : assigned) shards.push_back(gather(dataset, rows));
  return shards;
}

std::pair<double, Eigen::VectorXd> loss_and_gradient(
    const Model& model, const Eigen::VectorXd& w, const DataShard& shard,
    const std::vector<int>& batch_indices, int n_classes) {
  if (batch_indices.empty())
    throw std::invalid_argument("loss_and_gradient: empty batch");
  for (int i : batch_indices)
    if (i < 0 || i >= shard.features.rows())
      throw std::invalid_argument("loss_and_gradient: batch index out of range");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(batch_indices.size()),
                    shard.features.cols());
  Eigen::VectorXi y(static_cast<Eigen::Index>(batch_indices.size()));
  for (std::size_t i = 0; i < batch_indices.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = shard.features.row(batch_indices[i]);
    y[static_cast<Eigen::Index>(i)] = shard.labels[batch_indices[i]];
  }
  return model.loss_and_gradient(w, X, y, n_classes);
}

Eigen::VectorXd local_update(const Model& model, Eigen::VectorXd w,
                             const DataShard& shard, int n_classes, double eta,
                             int tau_star, int batch_size, Rng& rng,
                             bool literal_step_scale) {
  if (eta <= 0.0) throw std::invalid_argument("local_update: eta must be > 0");
  if (tau_star < 1) throw std::invalid_argument("local_update: tau_star must be >= 1");
  const int k_n = static_cast<int>(shard.features.rows());
  if (k_n < 1) throw std::invalid_argument("local_update: empty shard");
  const double step = literal_step_scale ? eta / static_cast<double>(k_n) : eta;
  const bool full_batch = batch_size <= 0 || batch_size >= k_n;

  std::vector<int> batch;
  for (int tau = 0; tau < tau_star; ++tau) {
    batch.clear();
    if (full_batch) {
      batch.resize(static_cast<std::size_t>(k_n));
      std::iota(batch.begin(), batch.end(), 0);
    } else {
      for (int i = 0; i < batch_size; ++i)
        batch.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(k_n)));
    }
    auto [loss, grad] = loss_and_gradient(model, w, shard, batch, n_classes);
    (void)loss;
    w -= step * grad;
  }
  if (!w.allFinite()) throw std::runtime_error("local_update: non-finite parameters");
  return w;
}

Eigen::VectorXd aggregate(const std::vector<Eigen::VectorXd>& models,
                          const std::vector<double>& alphas) {
  if (models.empty() || models.size() != alphas.size())
    throw std::invalid_argument("aggregate: models/weights size mismatch");
  double total = 0.0;
  for (double a : alphas) {
    if (a <= 0.0) throw std::invalid_argument("aggregate: weights must be > 0");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("aggregate: weights must sum to 1");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(models[0].size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].size() != out.size())
      throw std::invalid_argument("aggregate: dimension mismatch");
    out += alphas[i] * models[i];
  }
  return out;
}

Dataset make_gaussian_mixture(int n_samples, int n_features, int n_classes,
                              double separation, Rng& rng) {
  if (n_samples < 1 || n_features < 1 || n_classes < 2)
    throw std::invalid_argument("make_gaussian_mixture: bad sizes");
  Eigen::MatrixXd means(n_classes, n_features);
  for (int c = 0; c < n_classes; ++c)
    for (int j = 0; j < n_features; ++j) means(c, j) = separation * normal_unit(rng);

  Dataset ds;
  ds.n_classes = n_classes;
  ds.features.resize(n_samples, n_features);
  ds.labels.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    int c = i % n_classes;
    ds.labels[i] = c;
    for (int j = 0; j < n_features; ++j)
      ds.features(i, j) = means(c, j) + normal_unit(rng);
  }
  // Shuffle rows so sequential splits are class-balanced on average.
  std::vector<int> perm = shuffled_indices(n_samples, rng);
  Eigen::MatrixXd f = ds.features;
  Eigen::VectorXi l = ds.labels;
  for (int i = 0; i < n_samples; ++i) {
    ds.features.row(i) = f.row(perm[static_cast<std::size_t>(i)]);
    ds.labels[i] = l[perm[static_cast<std::size_t>(i)]];
  }
  return ds;
}

double accuracy(const Model& model, const Eigen::VectorXd& w,
                const Dataset& test_set) {
  Eigen::VectorXi pred = model.predict(w, test_set.features, test_set.n_classes);
  int correct = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i)
    if (pred[i] == test_set.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

std::vector<RoundMetrics> run_nfl(const NflConfig& cfg,
                                  std::vector<VehicleState> vehicles,
                                  const Eigen::Vector2d& bs_position,
                                  const Allocator& allocator, const Model& model,
                                  Eigen::VectorXd init_weights,
                                  const std::vector<DataShard>& shards,
                                  const Dataset& test_set) {
  const int n_classes = test_set.n_classes;
  const int n_vehicles = static_cast<int>(vehicles.size());
  Eigen::VectorXd w = std::move(init_weights);
  std::vector<RoundMetrics> trace;
  trace.reserve(static_cast<std::size_t>(cfg.rounds));

  auto shard_of = [&](int vehicle_id) -> const DataShard& {
    return shards[static_cast<std::size_t>(vehicles[vehicle_id].shard_id)];
  };
  auto weighted_loss = [&](const std::vector<int>& ids) {
    double loss_sum = 0.0;
    double k_sum = 0.0;
    for (int id : ids) {
      const DataShard& s = shard_of(id);
      std::vector<int> all(static_cast<std::size_t>(s.features.rows()));
      std::iota(all.begin(), all.end(), 0);
      auto [loss, grad] = loss_and_gradient(model, w, s, all, n_classes);
      (void)grad;
      double k = static_cast<double>(s.features.rows());
      loss_sum += k * loss;
      k_sum += k;
    }
    return loss_sum / k_sum;
  };

  for (long t = 0; t < cfg.rounds; ++t) {
    vehicles = advance_positions(vehicles, cfg.slot_dt, cfg.arena_side);
    Rng rng_ch = make_rng(cfg.seed, Stream::channel, static_cast<std::uint64_t>(t));
    ChannelSnapshot snap = snapshot(vehicles, bs_position, cfg.noise_power,
                                    cfg.pathloss_exponent, rng_ch, t);
    SelectionResult sel = allocator(snap);

    if (sel.m_t > 0) {
      std::vector<Eigen::VectorXd> locals;
      std::vector<double> alphas;
      double k_total = 0.0;
      for (int id : sel.selected)
        k_total += static_cast<double>(shard_of(id).features.rows());
      for (int id : sel.selected) {
        Rng rng_v = make_rng(cfg.seed, Stream::local_sgd,
                             static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(id));
        locals.push_back(local_update(model, w, shard_of(id), n_classes, cfg.eta,
                                      cfg.local_steps, cfg.batch_size, rng_v,
                                      cfg.literal_step_scale));
        alphas.push_back(cfg.uniform_weights
                             ? 1.0 / static_cast<double>(sel.m_t)
                             : static_cast<double>(shard_of(id).features.rows()) /
                                   k_total);
      }
      w = aggregate(locals, alphas);
    }

    RoundMetrics m;
    m.round = t;
    m.m_t = sel.m_t;
    m.joining_ratio = sel.joining_ratio;
    if (sel.m_t > 0) {
      m.train_loss = weighted_loss(sel.selected);
    } else {
      std::vector<int> all_ids(static_cast<std::size_t>(n_vehicles));
      std::iota(all_ids.begin(), all_ids.end(), 0);
      m.train_loss = weighted_loss(all_ids);
    }
    m.test_accuracy = accuracy(model, w, test_set);
    trace.push_back(m);
  }
  return trace;
}

}  // namespace fvn
