// Minimal forward pass for dense models: y <- act(W^T y + b) layer by layer.
// Enough to measure argmax accuracy before and after weight transforms.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "specmet/model_store.hpp"

namespace specmet {

struct Dataset {
  Eigen::MatrixXd inputs;             // one row per example
  std::vector<std::int64_t> labels;   // argmax targets, one per row
};

Dataset load_dataset(const std::filesystem::path& inputs_path,
                     const std::filesystem::path& labels_path);

// Runs one input column vector through every layer. Dense layers only;
// softmax is accepted on the final layer alone.
Eigen::VectorXd forward(const ModelBundle& model, const Eigen::VectorXd& x);

// Fraction of rows whose argmax matches the label; argmax ties resolve to the
// lowest index.
double accuracy(const ModelBundle& model, const Dataset& data);

}  // namespace specmet
