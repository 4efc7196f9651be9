#pragma once

#include <string>

#include "fvn/fl.hpp"

namespace fvn {

// Columnar on-disk dataset: <base>.bin holds the feature matrix (row-major)
// followed by the label vector, all little-endian IEEE-754 doubles; <base>.json
// is a sidecar with {"n_samples", "n_features", "n_classes"}.
void save_dataset(const Dataset& ds, const std::string& base_path);
Dataset load_dataset(const std::string& base_path);

}  // namespace fvn
