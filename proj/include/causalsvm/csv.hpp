#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "causalsvm/dataset.hpp"

namespace causalsvm {

// Dataset CSV layout: feature columns f0..f{d-1}, group in {T, C},
// y_obs in {-1, 1}, optional y_t / y_c / ratio columns (cells may be empty),
// and pass-through columns prefixed meta_ (ignored on read). Any other
// column name is rejected. Column order is free on read; the writer emits
// f0..f{d-1}, group, y_obs[, y_t][, y_c][, ratio].
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const Dataset& ds, const std::string& path);

// Feature-only CSV (header f0..f{d-1}), used by predict/grid inputs.
// read_features_csv also accepts a full dataset CSV and keeps just the
// feature columns.
Eigen::MatrixXd read_features_csv(const std::string& path);

// Shortest round-trip decimal text for a double (what every writer uses).
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& what);

}  // namespace causalsvm
