// Model directories on disk: a manifest.json describing layers plus one NPY
// file per tensor. Loading is eager and validating; writing always stores
// 64-bit floats so a round trip reproduces the bundle bit-exactly.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specmet/npy.hpp"

namespace specmet {

enum class LayerKind { dense, conv2d };
enum class Activation { relu, identity, softmax };

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::dense;
  std::vector<std::int64_t> shape;  // dense: [N, M]; conv2d: [k, k, N, M]
  std::string weight_file;
  std::optional<std::string> init_file;
  std::optional<std::string> bias_file;
  std::optional<Activation> activation;
};

// Tensors that travel with a layer. `init` and `bias` mirror the optional
// manifest entries.
struct LayerData {
  Tensor weights;
  std::optional<Tensor> init;
  std::optional<Tensor> bias;
};

struct ModelBundle {
  std::string model_id;
  std::string group;
  std::string subgroup;
  std::map<std::string, double> hyperparams;
  std::optional<double> train_acc;
  std::optional<double> test_acc;
  std::vector<LayerSpec> layers;
  std::vector<LayerData> data;  // parallel to layers

  std::size_t depth() const { return layers.size(); }
};

// One N x M matrix pulled out of a layer. Dense layers give exactly one;
// conv2d layers of shape (k, k, N, M) give k*k, indexed row-major over the
// kernel grid.
struct WeightMatrix {
  std::string owner_layer;
  int slice_index = 0;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

ModelBundle load_model(const std::filesystem::path& dir);
void write_model(const ModelBundle& bundle, const std::filesystem::path& dir);

std::vector<WeightMatrix> extract_matrices(const LayerSpec& layer, const Tensor& weights);

// Writes transformed slices back into a tensor laid out like `layer`.
void replace_matrices(const LayerSpec& layer, const std::vector<WeightMatrix>& slices,
                      Tensor& weights);

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

}  // namespace specmet
