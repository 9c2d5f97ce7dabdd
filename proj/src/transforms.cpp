#include "specmet/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "specmet/errors.hpp"

namespace specmet {

WeightMatrix svd_smooth(const WeightMatrix& w, double keep_frac) {
  if (!(keep_frac > 0.0 && keep_frac <= 1.0))
    throw DomainError("svd_smooth: keep_frac must lie in (0, 1]");
  if (w.rows() == 0 || w.cols() == 0) throw DomainError("svd_smooth: empty matrix");
  if (!w.values.allFinite())
    throw DataError("svd_smooth: non-finite entries in '" + w.owner_layer + "' slice " +
                    std::to_string(w.slice_index));
  const Eigen::Index mind = std::min(w.rows(), w.cols());
  const Eigen::Index k =
      static_cast<Eigen::Index>(std::ceil(keep_frac * static_cast<double>(mind)));
  if (k >= mind) return w;  // nothing to truncate

  Eigen::BDCSVD<Eigen::MatrixXd> svd(w.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericError("svd_smooth: SVD failed on '" + w.owner_layer + "' slice " +
                       std::to_string(w.slice_index));
  WeightMatrix out;
  out.owner_layer = w.owner_layer;
  out.slice_index = w.slice_index;
  out.values = svd.matrixU().leftCols(k) *
               svd.singularValues().head(k).asDiagonal() *
               svd.matrixV().leftCols(k).transpose();
  return out;
}

double quantile(const Eigen::MatrixXd& values, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in [0, 1]");
  if (values.size() == 0) throw DomainError("quantile: empty input");
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

WeightMatrix clip_extremes(const WeightMatrix& w, double lo_q, double hi_q) {
  if (!(lo_q >= 0.0 && hi_q <= 1.0 && lo_q < hi_q))
    throw DomainError("clip_extremes: need 0 <= lo_q < hi_q <= 1");
  if (w.rows() == 0 || w.cols() == 0) throw DomainError("clip_extremes: empty matrix");
  if (!w.values.allFinite())
    throw DataError("clip_extremes: non-finite entries in '" + w.owner_layer + "' slice " +
                    std::to_string(w.slice_index));
  const double lo = quantile(w.values, lo_q);
  const double hi = quantile(w.values, hi_q);
  WeightMatrix out;
  out.owner_layer = w.owner_layer;
  out.slice_index = w.slice_index;
  out.values = w.values.cwiseMax(lo).cwiseMin(hi);
  return out;
}

ModelBundle transform_model(const ModelBundle& bundle, const TransformSpec& spec) {
  if (bundle.layers.size() != bundle.data.size())
    throw ShapeError("bundle layer/data lists out of sync for model " + bundle.model_id);
  const auto apply = [&](const WeightMatrix& w) {
    switch (spec.kind) {
      case TransformKind::svd10: return svd_smooth(w, 0.1);
      case TransformKind::svd20: return svd_smooth(w, 0.2);
      case TransformKind::clip: return clip_extremes(w, spec.lo_q, spec.hi_q);
    }
    throw DomainError("transform_model: unknown transform");
  };

  ModelBundle out = bundle;
  out.train_acc.reset();  // accuracies describe the old weights
  out.test_acc.reset();
  for (std::size_t i = 0; i < out.layers.size(); ++i) {
    std::vector<WeightMatrix> slices = extract_matrices(out.layers[i], out.data[i].weights);
    for (auto& s : slices) s = apply(s);
    replace_matrices(out.layers[i], slices, out.data[i].weights);
  }
  return out;
}

TransformKind parse_transform(const std::string& name) {
  if (name == "svd10") return TransformKind::svd10;
  if (name == "svd20") return TransformKind::svd20;
  if (name == "clip") return TransformKind::clip;
  throw DomainError("unknown transform '" + name + "' (want svd10, svd20, or clip)");
}

std::string transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::svd10: return "svd10";
    case TransformKind::svd20: return "svd20";
    case TransformKind::clip: return "clip";
  }
  return "svd20";
}

}  // namespace specmet
