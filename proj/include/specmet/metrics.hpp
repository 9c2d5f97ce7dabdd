// Per-matrix and per-model summaries: tail exponent, fit quality, log norms,
// and the alpha-weighted variants. Model metrics are unweighted means over
// extracted matrices; matrices the fitter skips stay in the norm averages but
// out of the alpha ones.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specmet/model_store.hpp"
#include "specmet/plfit.hpp"

namespace specmet {

enum class SkipReason { too_small, too_few_tail_points };

struct LayerMetrics {
  std::string owner_layer;
  int slice_index = 0;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  double lambda_max = 0.0;
  // -inf for an all-zero matrix; such matrices drop out of log-domain averages
  double log10_spectral = 0.0;
  double log10_frobenius = 0.0;
  std::optional<double> alpha;
  std::optional<double> d_ks;
  std::optional<double> log10_alpha_shatten;
  std::optional<SkipReason> skipped;
  std::optional<TPLFit> fit;  // full scan, for diagnostics export
};

struct ModelMetrics {
  std::string model_id;
  double alpha_avg = 0.0;
  double quality_of_alpha_fit = 0.0;
  double log_spectral_norm = 0.0;
  double log_frobenius_norm = 0.0;
  double alpha_hat = 0.0;
  double log_alpha_shatten_norm = 0.0;
  std::optional<double> distance_from_init;
  int n_matrices_used = 0;
  int n_matrices_skipped = 0;
};

// Matrices smaller than this along their least dimension are never fitted.
inline constexpr std::int64_t kMinFitDim = 10;

LayerMetrics layer_metrics(const WeightMatrix& w, int min_tail = kDefaultMinTail);

// Aggregation step, split out so the arithmetic is testable on hand-built
// inputs. `init_distances` must be empty or one entry per matrix.
ModelMetrics aggregate_layer_metrics(const std::string& model_id,
                                     const std::vector<LayerMetrics>& per_matrix,
                                     const std::vector<double>& init_distances = {});

ModelMetrics model_metrics(const ModelBundle& bundle, int min_tail = kDefaultMinTail);

// Per-matrix detail for the same bundle, in extraction order.
std::vector<LayerMetrics> collect_layer_metrics(const ModelBundle& bundle,
                                                int min_tail = kDefaultMinTail);

std::string skip_reason_name(SkipReason r);

// Canonical metric column order for reports.
const std::vector<std::string>& metric_names();

std::optional<double> metric_value(const ModelMetrics& m, const std::string& name);

}  // namespace specmet
