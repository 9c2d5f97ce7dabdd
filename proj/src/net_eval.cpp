#include "specmet/net_eval.hpp"

#include <cmath>

#include "specmet/errors.hpp"

namespace specmet {
namespace {

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
dense_weights(const LayerSpec& spec, const LayerData& data) {
  if (static_cast<std::int64_t>(data.weights.data.size()) != spec.shape[0] * spec.shape[1])
    throw ShapeError("weight tensor size mismatch in layer '" + spec.name + "'");
  return {data.weights.data.data(), spec.shape[0], spec.shape[1]};
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& inputs_path,
                     const std::filesystem::path& labels_path) {
  const Tensor t = read_array_file(inputs_path);
  if (t.shape.size() != 2)
    throw ShapeError("dataset inputs must be 2-D, got " + std::to_string(t.shape.size()) +
                     "-D in " + inputs_path.string());
  Dataset d;
  d.inputs = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(t.data.data(), t.shape[0],
                                                              t.shape[1]);
  d.labels = read_labels_file(labels_path);
  if (static_cast<std::int64_t>(d.labels.size()) != t.shape[0])
    throw ShapeError("dataset has " + std::to_string(t.shape[0]) + " rows but " +
                     std::to_string(d.labels.size()) + " labels");
  return d;
}

Eigen::VectorXd forward(const ModelBundle& model, const Eigen::VectorXd& x) {
  if (model.layers.empty()) throw ShapeError("model '" + model.model_id + "' has no layers");
  if (model.layers.size() != model.data.size())
    throw ShapeError("bundle layer/data lists out of sync for model " + model.model_id);
  Eigen::VectorXd y = x;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& spec = model.layers[i];
    const auto& data = model.data[i];
    if (spec.kind != LayerKind::dense)
      throw UnsupportedError("forward pass supports dense layers only; layer '" + spec.name +
                             "' is conv2d");
    const auto w = dense_weights(spec, data);
    if (y.size() != w.rows())
      throw ShapeError("layer '" + spec.name + "' expects input width " +
                       std::to_string(w.rows()) + ", got " + std::to_string(y.size()));
    Eigen::VectorXd z = w.transpose() * y;
    if (data.bias) {
      const auto& b = data.bias->data;
      if (static_cast<Eigen::Index>(b.size()) != z.size())
        throw ShapeError("bias length mismatch in layer '" + spec.name + "'");
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] += b[static_cast<std::size_t>(j)];
    }
    const Activation act = spec.activation.value_or(Activation::identity);
    const bool final_layer = i + 1 == model.layers.size();
    switch (act) {
      case Activation::identity:
        break;
      case Activation::relu:
        z = z.cwiseMax(0.0);
        break;
      case Activation::softmax: {
        if (!final_layer)
          throw UnsupportedError("softmax is only supported on the final layer; layer '" +
                                 spec.name + "' is not final");
        const double m = z.maxCoeff();
        z = (z.array() - m).exp();
        z /= z.sum();
        break;
      }
    }
    y = std::move(z);
  }
  return y;
}

double accuracy(const ModelBundle& model, const Dataset& data) {
  if (data.inputs.rows() == 0) throw InsufficientDataError("dataset is empty");
  if (static_cast<std::int64_t>(data.labels.size()) != data.inputs.rows())
    throw ShapeError("dataset rows and labels differ in count");
  if (model.layers.empty()) throw ShapeError("model '" + model.model_id + "' has no layers");
  const std::int64_t classes = model.layers.back().shape.back();
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] < 0 || data.labels[i] >= classes)
      throw DataError("label " + std::to_string(data.labels[i]) + " at row " +
                      std::to_string(i) + " outside final layer width " +
                      std::to_string(classes));
  }
  std::int64_t hits = 0;
  for (Eigen::Index r = 0; r < data.inputs.rows(); ++r) {
    const Eigen::VectorXd out = forward(model, data.inputs.row(r).transpose());
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < out.size(); ++j)
      if (out[j] > out[best]) best = j;  // ties keep the lowest index
    if (best == data.labels[static_cast<std::size_t>(r)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.inputs.rows());
}

}  // namespace specmet
