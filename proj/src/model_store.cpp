#include "specmet/model_store.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "specmet/errors.hpp"

namespace specmet {
namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_number()) throw FormatError(ctx + ": '" + key + "' must be a number");
  return j.get<double>();
}

std::optional<double> optional_number(const json& j, const std::string& key,
                                      const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return require_number(j.at(key), key, ctx);
}

std::optional<std::string> optional_string(const json& j, const std::string& key,
                                           const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw FormatError(ctx + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

LayerSpec parse_layer(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw FormatError(ctx + ": layer entries must be objects");
  LayerSpec spec;
  if (!j.contains("name") || !j.at("name").is_string())
    throw FormatError(ctx + ": layer missing string 'name'");
  spec.name = j.at("name").get<std::string>();
  if (spec.name.empty()) throw LoadError(ctx + ": layer name must be nonempty");
  const std::string lctx = ctx + ", layer '" + spec.name + "'";

  if (!j.contains("kind") || !j.at("kind").is_string())
    throw FormatError(lctx + ": missing string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dense") spec.kind = LayerKind::dense;
  else if (kind == "conv2d") spec.kind = LayerKind::conv2d;
  else throw FormatError(lctx + ": unknown kind '" + kind + "'");

  if (!j.contains("shape") || !j.at("shape").is_array())
    throw FormatError(lctx + ": missing array 'shape'");
  for (const auto& d : j.at("shape")) {
    if (!d.is_number_integer()) throw FormatError(lctx + ": shape entries must be integers");
    spec.shape.push_back(d.get<std::int64_t>());
  }
  const std::size_t want = spec.kind == LayerKind::dense ? 2 : 4;
  if (spec.shape.size() != want)
    throw LoadError(lctx + ": " + kind + " shape must have " + std::to_string(want) +
                    " dims, got " + std::to_string(spec.shape.size()));
  for (std::int64_t d : spec.shape)
    if (d < 1) throw LoadError(lctx + ": shape dims must be >= 1");
  if (spec.kind == LayerKind::conv2d && spec.shape[0] != spec.shape[1])
    throw LoadError(lctx + ": conv2d kernel must be square");

  if (!j.contains("weight_file") || !j.at("weight_file").is_string())
    throw FormatError(lctx + ": missing string 'weight_file'");
  spec.weight_file = j.at("weight_file").get<std::string>();
  spec.init_file = optional_string(j, "init_file", lctx);
  spec.bias_file = optional_string(j, "bias_file", lctx);
  if (auto act = optional_string(j, "activation", lctx)) spec.activation = parse_activation(*act);
  return spec;
}

Tensor load_tensor(const std::filesystem::path& root, const std::string& rel,
                   const std::vector<std::int64_t>& want_shape, const std::string& lctx) {
  const auto path = root / rel;
  if (!std::filesystem::exists(path)) throw LoadError(lctx + ": missing file " + path.string());
  Tensor t = read_array_file(path);
  if (!want_shape.empty() && t.shape != want_shape) {
    std::string a, b;
    for (auto d : t.shape) a += (a.empty() ? "" : "x") + std::to_string(d);
    for (auto d : want_shape) b += (b.empty() ? "" : "x") + std::to_string(d);
    throw LoadError(lctx + ": " + path.string() + " has shape " + a + ", manifest says " + b);
  }
  return t;
}

json manifest_json(const ModelBundle& b) {
  json j;
  j["model_id"] = b.model_id;
  j["group"] = b.group;
  j["subgroup"] = b.subgroup;
  j["hyperparams"] = json::object();
  for (const auto& [k, v] : b.hyperparams) j["hyperparams"][k] = v;
  j["train_acc"] = b.train_acc ? json(*b.train_acc) : json(nullptr);
  j["test_acc"] = b.test_acc ? json(*b.test_acc) : json(nullptr);
  j["layers"] = json::array();
  for (const auto& l : b.layers) {
    json jl;
    jl["name"] = l.name;
    jl["kind"] = l.kind == LayerKind::dense ? "dense" : "conv2d";
    jl["shape"] = l.shape;
    jl["weight_file"] = l.weight_file;
    jl["init_file"] = l.init_file ? json(*l.init_file) : json(nullptr);
    jl["bias_file"] = l.bias_file ? json(*l.bias_file) : json(nullptr);
    jl["activation"] = l.activation ? json(activation_name(*l.activation)) : json(nullptr);
    j["layers"].push_back(jl);
  }
  return j;
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  if (name == "softmax") return Activation::softmax;
  throw FormatError("unknown activation '" + name + "'");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::softmax: return "softmax";
  }
  return "identity";
}

ModelBundle load_model(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw LoadError("no manifest.json in " + dir.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("cannot parse " + manifest_path.string() + ": " + e.what());
  }
  const std::string ctx = manifest_path.string();
  if (!j.is_object()) throw FormatError(ctx + ": manifest must be a JSON object");

  ModelBundle b;
  if (!j.contains("model_id") || !j.at("model_id").is_string() ||
      j.at("model_id").get<std::string>().empty())
    throw LoadError(ctx + ": manifest needs a nonempty string 'model_id'");
  b.model_id = j.at("model_id").get<std::string>();
  b.group = optional_string(j, "group", ctx).value_or("");
  b.subgroup = optional_string(j, "subgroup", ctx).value_or("");
  if (j.contains("hyperparams")) {
    if (!j.at("hyperparams").is_object()) throw FormatError(ctx + ": 'hyperparams' must be an object");
    for (const auto& [k, v] : j.at("hyperparams").items())
      b.hyperparams[k] = require_number(v, k, ctx);
  }
  b.train_acc = optional_number(j, "train_acc", ctx);
  b.test_acc = optional_number(j, "test_acc", ctx);

  if (!j.contains("layers") || !j.at("layers").is_array())
    throw FormatError(ctx + ": manifest needs a 'layers' array");
  std::set<std::string> names;
  for (const auto& jl : j.at("layers")) {
    LayerSpec spec = parse_layer(jl, ctx);
    if (!names.insert(spec.name).second)
      throw LoadError(ctx + ": duplicate layer name '" + spec.name + "'");
    LayerData data;
    const std::string lctx = ctx + ", layer '" + spec.name + "'";
    data.weights = load_tensor(dir, spec.weight_file, spec.shape, lctx);
    if (spec.init_file) data.init = load_tensor(dir, *spec.init_file, spec.shape, lctx);
    if (spec.bias_file) {
      const std::int64_t m = spec.shape.back();
      data.bias = load_tensor(dir, *spec.bias_file, {m}, lctx);
    }
    b.layers.push_back(std::move(spec));
    b.data.push_back(std::move(data));
  }
  return b;
}

void write_model(const ModelBundle& bundle, const std::filesystem::path& dir) {
  if (bundle.layers.size() != bundle.data.size())
    throw ShapeError("bundle layer/data lists out of sync for model " + bundle.model_id);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
    const auto& spec = bundle.layers[i];
    const auto& data = bundle.data[i];
    const auto write_rel = [&](const std::string& rel, const Tensor& t) {
      const auto path = dir / rel;
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      write_array_file(path, t);
    };
    write_rel(spec.weight_file, data.weights);
    if (spec.init_file) {
      if (!data.init) throw LoadError("layer '" + spec.name + "' names an init_file but carries no tensor");
      write_rel(*spec.init_file, *data.init);
    }
    if (spec.bias_file) {
      if (!data.bias) throw LoadError("layer '" + spec.name + "' names a bias_file but carries no tensor");
      write_rel(*spec.bias_file, *data.bias);
    }
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw LoadError("cannot write manifest.json in " + dir.string());
  out << manifest_json(bundle).dump(2) << "\n";
}

std::vector<WeightMatrix> extract_matrices(const LayerSpec& layer, const Tensor& weights) {
  if (weights.shape != layer.shape)
    throw ShapeError("tensor shape does not match layer '" + layer.name + "'");
  if (static_cast<std::int64_t>(weights.data.size()) != weights.size())
    throw ShapeError("tensor data length does not match shape in layer '" + layer.name + "'");

  std::vector<WeightMatrix> out;
  const auto check = [&](const WeightMatrix& w) {
    if (!w.values.allFinite())
      throw DataError("non-finite weight in layer '" + w.owner_layer + "' slice " +
                      std::to_string(w.slice_index));
  };
  if (layer.kind == LayerKind::dense) {
    const std::int64_t n = layer.shape[0], m = layer.shape[1];
    WeightMatrix w;
    w.owner_layer = layer.name;
    w.slice_index = 0;
    w.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(weights.data.data(), n, m);
    check(w);
    out.push_back(std::move(w));
  } else {
    const std::int64_t k = layer.shape[0], n = layer.shape[2], m = layer.shape[3];
    for (std::int64_t i = 0; i < k; ++i) {
      for (std::int64_t j = 0; j < k; ++j) {
        WeightMatrix w;
        w.owner_layer = layer.name;
        w.slice_index = static_cast<int>(i * k + j);
        const double* base = weights.data.data() + ((i * k + j) * n) * m;
        w.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(base, n, m);
        check(w);
        out.push_back(std::move(w));
      }
    }
  }
  return out;
}

void replace_matrices(const LayerSpec& layer, const std::vector<WeightMatrix>& slices,
                      Tensor& weights) {
  if (weights.shape != layer.shape)
    throw ShapeError("tensor shape does not match layer '" + layer.name + "'");
  const std::size_t want = layer.kind == LayerKind::dense
                               ? 1
                               : static_cast<std::size_t>(layer.shape[0] * layer.shape[1]);
  if (slices.size() != want)
    throw ShapeError("layer '" + layer.name + "' expects " + std::to_string(want) +
                     " slices, got " + std::to_string(slices.size()));
  const std::int64_t n = layer.shape[layer.shape.size() - 2];
  const std::int64_t m = layer.shape.back();
  for (const auto& w : slices) {
    if (w.rows() != n || w.cols() != m)
      throw ShapeError("slice " + std::to_string(w.slice_index) + " of layer '" + layer.name +
                       "' has wrong dimensions");
    double* base = weights.data.data() + static_cast<std::int64_t>(w.slice_index) * n * m;
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        base, n, m) = w.values;
  }
}

}  // namespace specmet
