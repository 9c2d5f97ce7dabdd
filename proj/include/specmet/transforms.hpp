// Weight-matrix surgeries: rank truncation from the SVD, and clamping of
// extreme entries to empirical quantiles. transform_model applies one of them
// to every matrix of a bundle (conv slices independently) and clears the
// recorded accuracies, since they no longer describe the weights.
#pragma once

#include <Eigen/Dense>

#include "specmet/model_store.hpp"

namespace specmet {

// Keeps the top ceil(keep_frac * min(N, M)) singular directions.
// keep_frac in (0, 1]; keep_frac = 1 returns the matrix unchanged.
WeightMatrix svd_smooth(const WeightMatrix& w, double keep_frac);

// Clamps entries into [Q(lo_q), Q(hi_q)], quantiles taken over the matrix's
// own entries with linear interpolation between order statistics.
WeightMatrix clip_extremes(const WeightMatrix& w, double lo_q = 0.005, double hi_q = 0.995);

enum class TransformKind { svd10, svd20, clip };

struct TransformSpec {
  TransformKind kind = TransformKind::svd20;
  double lo_q = 0.005;  // clip only
  double hi_q = 0.995;
};

ModelBundle transform_model(const ModelBundle& bundle, const TransformSpec& spec);

TransformKind parse_transform(const std::string& name);
std::string transform_name(TransformKind kind);

// Interpolated order statistic used by clip_extremes, exposed for reuse.
double quantile(const Eigen::MatrixXd& values, double q);

}  // namespace specmet
