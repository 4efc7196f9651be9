#include "fvn/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <vector>

namespace fvn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "dataset files are little-endian; byte swapping not implemented");

void write_doubles(std::ofstream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("dataset file truncated");
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& base_path) {
  nlohmann::json sidecar = {
      {"n_samples", ds.features.rows()},
      {"n_features", ds.features.cols()},
      {"n_classes", ds.n_classes},
  };
  std::ofstream js(base_path + ".json");
  if (!js) throw std::runtime_error("cannot open " + base_path + ".json");
  js << sidecar.dump(2) << "\n";

  std::ofstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + base_path + ".bin");
  // Row-major feature matrix, then labels as doubles.
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
    Eigen::RowVectorXd row = ds.features.row(i);
    write_doubles(bin, row.data(), static_cast<std::size_t>(row.size()));
  }
  std::vector<double> labels(static_cast<std::size_t>(ds.labels.size()));
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i)
    labels[static_cast<std::size_t>(i)] = static_cast<double>(ds.labels[i]);
  if (!labels.empty()) write_doubles(bin, labels.data(), labels.size());
  if (!bin) throw std::runtime_error("write failed: " + base_path + ".bin");
}

Dataset load_dataset(const std::string& base_path) {
  std::ifstream js(base_path + ".json");
  if (!js) throw std::runtime_error("cannot open " + base_path + ".json");
  nlohmann::json sidecar = nlohmann::json::parse(js);
  const auto n = sidecar.at("n_samples").get<Eigen::Index>();
  const auto d = sidecar.at("n_features").get<Eigen::Index>();
  const auto c = sidecar.at("n_classes").get<int>();

  Dataset ds;
  ds.n_classes = c;
  ds.features.resize(n, d);
  ds.labels.resize(n);

  std::ifstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + base_path + ".bin");
  std::vector<double> row(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    read_doubles(bin, row.data(), row.size());
    for (Eigen::Index j = 0; j < d; ++j)
      ds.features(i, j) = row[static_cast<std::size_t>(j)];
  }
  std::vector<double> labels(static_cast<std::size_t>(n));
  if (n > 0) read_doubles(bin, labels.data(), labels.size());
  for (Eigen::Index i = 0; i < n; ++i)
    ds.labels[i] = static_cast<int>(labels[static_cast<std::size_t>(i)]);
  return ds;
}

}  // namespace fvn
