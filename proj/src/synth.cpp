#include "specmet/synth.hpp"

#include <algorithm>
#include <cmath>

#include "specmet/errors.hpp"
#include "specmet/rng.hpp"

namespace specmet {
namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, CounterRng& rng) {
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.next_gaussian();
  return g;
}

// thin Q factor of a Gaussian matrix: `take` orthonormal columns
Eigen::MatrixXd random_orthonormal(int rows, int take, CounterRng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(rows, take, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, take);
}

std::string two_digit(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

Tensor tensor_from_matrix(const Eigen::MatrixXd& m) {
  Tensor t;
  t.shape = {m.rows(), m.cols()};
  t.data.resize(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.data.data(), m.rows(), m.cols()) = m;
  return t;
}

LayerSpec dense_spec(const std::string& name, std::int64_t rows, std::int64_t cols,
                     std::optional<Activation> act = std::nullopt) {
  LayerSpec spec;
  spec.name = name;
  spec.kind = LayerKind::dense;
  spec.shape = {rows, cols};
  spec.weight_file = name + ".npy";
  spec.activation = act;
  return spec;
}

}  // namespace

double tpl_quantile(double alpha, double x_min, double x_max, double u) {
  if (!(alpha > 1.0)) throw DomainError("tpl_quantile: alpha must be > 1");
  if (!(x_min > 0.0)) throw DomainError("tpl_quantile: x_min must be > 0");
  if (!(x_max > x_min)) throw DomainError("tpl_quantile: x_max must exceed x_min");
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("tpl_quantile: u must lie in [0, 1]");
  const double c = 1.0 - alpha;
  const double lo = std::pow(x_min, c);
  const double hi = std::pow(x_max, c);
  return std::pow(lo + u * (hi - lo), 1.0 / c);
}

Eigen::VectorXd sample_tpl(double alpha, double x_min, double x_max, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_tpl: n must be >= 1");
  CounterRng rng(seed);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = tpl_quantile(alpha, x_min, x_max, rng.next_unit());
  return out;
}

Eigen::VectorXd tpl_quantile_grid(double alpha, double x_min, double x_max, int n) {
  if (n < 1) throw DomainError("tpl_quantile_grid: n must be >= 1");
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out[i] = tpl_quantile(alpha, x_min, x_max, u);
  }
  return out;
}

WeightMatrix matrix_with_esd(const Eigen::VectorXd& eigs, int rows, int cols,
                             std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw DomainError("matrix_with_esd: dimensions must be >= 1");
  const int r = std::min(rows, cols);
  if (eigs.size() != r)
    throw DomainError("matrix_with_esd: need min(rows, cols) = " + std::to_string(r) +
                      " eigenvalues, got " + std::to_string(eigs.size()));
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    if (!(eigs[i] >= 0.0) || !std::isfinite(eigs[i]))
      throw DomainError("matrix_with_esd: eigenvalues must be finite and >= 0");

  CounterRng rng(seed, 1);
  const Eigen::MatrixXd u = random_orthonormal(rows, r, rng);
  const Eigen::MatrixXd v = random_orthonormal(cols, r, rng);
  WeightMatrix w;
  w.owner_layer = "synthetic";
  w.slice_index = 0;
  w.values = u * eigs.array().sqrt().matrix().asDiagonal() * v.transpose();
  return w;
}

std::vector<ModelRecord> synth_simpson(int n_groups, int n_per_group,
                                       const SimpsonGeometry& geom, std::uint64_t seed) {
  if (n_groups < 1) throw DomainError("synth_simpson: n_groups must be >= 1");
  if (n_per_group < 3) throw DomainError("synth_simpson: n_per_group must be >= 3");
  if (!(geom.within_slope < 0.0)) throw DomainError("synth_simpson: within_slope must be < 0");
  if (geom.noise < 0.0) throw DomainError("synth_simpson: noise must be >= 0");

  std::vector<ModelRecord> records;
  records.reserve(static_cast<std::size_t>(n_groups) * n_per_group);
  CounterRng rng(seed, 2);
  for (int g = 0; g < n_groups; ++g) {
    for (int i = 0; i < n_per_group; ++i) {
      const double t = n_per_group == 1
                           ? 0.0
                           : static_cast<double>(i) / (n_per_group - 1) - 0.5;
      const double x = g * geom.metric_offset + t * geom.within_spread;
      const double y = g * geom.target_offset + geom.within_slope * t * geom.within_spread +
                       geom.noise * rng.next_gaussian();
      ModelRecord rec;
      rec.model_id = "g" + std::to_string(g) + "_m" + two_digit(i);
      rec.subgroup = "g" + std::to_string(g);
      rec.values[geom.metric_name] = x;
      rec.test_acc = y;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<ModelRecord> synth_uniform_trend(int n_groups, int n_per_group, double slope,
                                             double noise, std::uint64_t seed) {
  if (n_groups < 1) throw DomainError("synth_uniform_trend: n_groups must be >= 1");
  if (n_per_group < 3) throw DomainError("synth_uniform_trend: n_per_group must be >= 3");
  if (noise < 0.0) throw DomainError("synth_uniform_trend: noise must be >= 0");
  std::vector<ModelRecord> records;
  CounterRng rng(seed, 3);
  for (int g = 0; g < n_groups; ++g) {
    for (int i = 0; i < n_per_group; ++i) {
      const double x = g + static_cast<double>(i) / n_per_group;
      const double y = slope * x + noise * rng.next_gaussian();
      ModelRecord rec;
      rec.model_id = "g" + std::to_string(g) + "_m" + two_digit(i);
      rec.subgroup = "g" + std::to_string(g);
      rec.values["alpha_avg"] = x;
      rec.test_acc = y;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

ModelBundle make_tpl_model(const std::string& model_id, const std::vector<double>& alphas,
                           int rows, int cols, std::uint64_t seed) {
  if (alphas.empty()) throw DomainError("make_tpl_model: need at least one layer alpha");
  if (rows < 10 || cols < 10) throw DomainError("make_tpl_model: layers must be at least 10x10");
  ModelBundle b;
  b.model_id = model_id;
  b.group = "synthetic";
  b.subgroup = "synthetic";
  b.hyperparams["depth"] = static_cast<double>(alphas.size());
  const int r = std::min(rows, cols);
  for (std::size_t l = 0; l < alphas.size(); ++l) {
    const Eigen::VectorXd eigs = tpl_quantile_grid(alphas[l], 1.0, 1e4, r);
    const WeightMatrix w =
        matrix_with_esd(eigs, rows, cols, mix64(seed + kRngGolden * (l + 1)));
    LayerSpec spec = dense_spec("fc" + std::to_string(l + 1), rows, cols);
    LayerData data;
    data.weights = tensor_from_matrix(w.values);
    b.layers.push_back(std::move(spec));
    b.data.push_back(std::move(data));
  }
  return b;
}

std::vector<ModelBundle> make_simpson_corpus(int n_groups, int n_per_group,
                                             std::uint64_t seed) {
  if (n_groups < 2) throw DomainError("make_simpson_corpus: need at least 2 groups");
  if (n_per_group < 3) throw DomainError("make_simpson_corpus: need at least 3 models per group");
  std::vector<ModelBundle> corpus;
  CounterRng noise_rng(seed, 4);
  for (int g = 0; g < n_groups; ++g) {
    for (int i = 0; i < n_per_group; ++i) {
      const double t = static_cast<double>(i) / (n_per_group - 1);  // 0..1 inside the group
      // within a group alpha rises and test accuracy falls; across groups both
      // centers rise, which is what flips the pooled trend
      const double alpha = 2.0 + 0.55 * g + 0.45 * t;
      const double acc = 0.50 + 0.08 * g - 0.05 * t + 0.003 * noise_rng.next_gaussian();
      const int depth = 2 + g % 2;
      ModelBundle b = make_tpl_model(
          "g" + std::to_string(g) + "_m" + two_digit(i), std::vector<double>(depth, alpha),
          128, 192, mix64(seed) + kRngGolden * (static_cast<std::uint64_t>(g) * 1000 + i));
      b.group = "planted";
      b.subgroup = "g" + std::to_string(g);
      b.hyperparams["batch_size"] = static_cast<double>(16 << (i % 3));
      b.hyperparams["dropout"] = (i % 2) * 0.5;
      b.test_acc = acc;
      b.train_acc = std::min(1.0, acc + 0.12);
      corpus.push_back(std::move(b));
    }
  }
  return corpus;
}

EvalCase make_separable_case(int dim, int classes, int samples, std::uint64_t seed) {
  if (classes < 2 || dim < classes) throw DomainError("make_separable_case: need dim >= classes >= 2");
  if (samples < 1) throw DomainError("make_separable_case: samples must be >= 1");
  CounterRng rng(seed, 5);
  // class c scores along coordinate c; inputs are noisy prototypes
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, classes);
  for (int c = 0; c < classes; ++c) w(c, c) = 1.0;

  EvalCase ec;
  ec.model.model_id = "separable";
  ec.model.group = "synthetic";
  ec.model.subgroup = "synthetic";
  LayerSpec spec = dense_spec("readout", dim, classes, Activation::identity);
  LayerData data;
  data.weights = tensor_from_matrix(w);
  ec.model.layers.push_back(std::move(spec));
  ec.model.data.push_back(std::move(data));

  ec.dataset.inputs.resize(samples, dim);
  ec.dataset.labels.resize(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const std::int64_t label = static_cast<std::int64_t>(rng.next_u64() % classes);
    ec.dataset.labels[static_cast<std::size_t>(s)] = label;
    for (int j = 0; j < dim; ++j) ec.dataset.inputs(s, j) = 0.05 * rng.next_gaussian();
    ec.dataset.inputs(s, static_cast<int>(label)) += 1.0;
  }
  return ec;
}

EvalCase make_mlp_case(int dim, int hidden, int classes, int samples, std::uint64_t seed) {
  if (classes < 2 || hidden < classes || dim < classes)
    throw DomainError("make_mlp_case: need dim, hidden >= classes >= 2");
  if (samples < 1) throw DomainError("make_mlp_case: samples must be >= 1");
  CounterRng rng(seed, 6);

  // Axis-aligned signal with a decaying spectrum so top-k truncation keeps the
  // class coordinates, plus a faint dense perturbation so the matrices are not
  // literally diagonal.
  Eigen::MatrixXd w1 = Eigen::MatrixXd::Zero(dim, hidden);
  const int r1 = std::min(dim, hidden);
  for (int i = 0; i < r1; ++i) w1(i, i) = std::pow(0.82, i);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < hidden; ++j) w1(i, j) += 1e-3 * rng.next_gaussian();

  Eigen::MatrixXd w2 = Eigen::MatrixXd::Zero(hidden, classes);
  for (int c = 0; c < classes; ++c) w2(c, c) = std::pow(0.9, c) * 0.5 + 0.5;
  for (int i = 0; i < hidden; ++i)
    for (int j = 0; j < classes; ++j) w2(i, j) += 1e-3 * rng.next_gaussian();

  EvalCase ec;
  ec.model.model_id = "mlp";
  ec.model.group = "synthetic";
  ec.model.subgroup = "synthetic";
  LayerSpec s1 = dense_spec("fc1", dim, hidden, Activation::relu);
  LayerData d1;
  d1.weights = tensor_from_matrix(w1);
  s1.bias_file = "fc1_bias.npy";
  d1.bias = Tensor{{hidden}, std::vector<double>(static_cast<std::size_t>(hidden), 0.01)};
  LayerSpec s2 = dense_spec("fc2", hidden, classes, Activation::softmax);
  LayerData d2;
  d2.weights = tensor_from_matrix(w2);
  ec.model.layers.push_back(std::move(s1));
  ec.model.data.push_back(std::move(d1));
  ec.model.layers.push_back(std::move(s2));
  ec.model.data.push_back(std::move(d2));

  ec.dataset.inputs.resize(samples, dim);
  ec.dataset.labels.resize(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const std::int64_t label = static_cast<std::int64_t>(rng.next_u64() % classes);
    ec.dataset.labels[static_cast<std::size_t>(s)] = label;
    for (int j = 0; j < dim; ++j) ec.dataset.inputs(s, j) = 0.03 * rng.next_gaussian();
    ec.dataset.inputs(s, static_cast<int>(label)) += 1.0;
  }
  return ec;
}

}  // namespace specmet
