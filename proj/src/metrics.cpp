#include "specmet/metrics.hpp"

#include <cmath>
#include <limits>

#include "specmet/errors.hpp"
#include "specmet/spectra.hpp"

namespace specmet {
namespace {

double log10_or_neg_inf(double v) {
  return v > 0.0 ? std::log10(v) : -std::numeric_limits<double>::infinity();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

LayerMetrics layer_metrics(const WeightMatrix& w, int min_tail) {
  LayerMetrics lm;
  lm.owner_layer = w.owner_layer;
  lm.slice_index = w.slice_index;
  lm.rows = w.rows();
  lm.cols = w.cols();
  const ESD e = esd(w);
  lm.lambda_max = e.lambda_max();
  lm.log10_spectral = log10_or_neg_inf(lm.lambda_max);
  lm.log10_frobenius = log10_or_neg_inf(frobenius_norm_sq(e));

  if (std::min(w.rows(), w.cols()) < kMinFitDim) {
    lm.skipped = SkipReason::too_small;
    return lm;
  }
  try {
    TPLFit fit = fit_tpl(e, min_tail);
    lm.alpha = fit.alpha;
    lm.d_ks = fit.d_ks;
    lm.log10_alpha_shatten = log10_or_neg_inf(shatten_norm_sum(e, fit.alpha));
    lm.fit = std::move(fit);
  } catch (const TooFewTailPointsError&) {
    lm.skipped = SkipReason::too_few_tail_points;
  }
  return lm;
}

ModelMetrics aggregate_layer_metrics(const std::string& model_id,
                                     const std::vector<LayerMetrics>& per_matrix,
                                     const std::vector<double>& init_distances) {
  if (per_matrix.empty())
    throw InsufficientDataError("model '" + model_id + "' has no extracted matrices");
  if (!init_distances.empty() && init_distances.size() != per_matrix.size())
    throw ShapeError("init distance list out of step with matrices for model '" + model_id +
                     "'");

  std::vector<double> alphas, d_kss, alpha_hats, shattens;
  std::vector<double> log_spectrals, log_frobs;
  int skipped = 0;
  for (const auto& lm : per_matrix) {
    if (lm.skipped) {
      ++skipped;
    } else {
      alphas.push_back(*lm.alpha);
      d_kss.push_back(*lm.d_ks);
      alpha_hats.push_back(*lm.alpha * lm.log10_spectral);
      shattens.push_back(*lm.log10_alpha_shatten);
    }
    if (std::isfinite(lm.log10_spectral)) log_spectrals.push_back(lm.log10_spectral);
    if (std::isfinite(lm.log10_frobenius)) log_frobs.push_back(lm.log10_frobenius);
  }
  if (alphas.empty())
    throw InsufficientDataError("model '" + model_id + "' has no usable matrices: all " +
                                std::to_string(per_matrix.size()) + " were skipped");

  ModelMetrics m;
  m.model_id = model_id;
  m.alpha_avg = mean(alphas);
  m.quality_of_alpha_fit = mean(d_kss);
  m.alpha_hat = mean(alpha_hats);
  m.log_alpha_shatten_norm = mean(shattens);
  m.log_spectral_norm = log_spectrals.empty()
                            ? -std::numeric_limits<double>::infinity()
                            : mean(log_spectrals);
  m.log_frobenius_norm = log_frobs.empty() ? -std::numeric_limits<double>::infinity()
                                           : mean(log_frobs);
  if (!init_distances.empty()) m.distance_from_init = mean(init_distances);
  m.n_matrices_used = static_cast<int>(per_matrix.size()) - skipped;
  m.n_matrices_skipped = skipped;
  return m;
}

std::vector<LayerMetrics> collect_layer_metrics(const ModelBundle& bundle, int min_tail) {
  if (bundle.layers.size() != bundle.data.size())
    throw ShapeError("bundle layer/data lists out of sync for model " + bundle.model_id);
  std::vector<LayerMetrics> out;
  for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
    for (const auto& w : extract_matrices(bundle.layers[i], bundle.data[i].weights))
      out.push_back(layer_metrics(w, min_tail));
  }
  return out;
}

ModelMetrics model_metrics(const ModelBundle& bundle, int min_tail) {
  const std::vector<LayerMetrics> per_matrix = collect_layer_metrics(bundle, min_tail);

  std::vector<double> init_distances;
  bool all_have_init = !bundle.layers.empty();
  for (const auto& data : bundle.data)
    if (!data.init) all_have_init = false;
  if (all_have_init) {
    for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
      const auto current = extract_matrices(bundle.layers[i], bundle.data[i].weights);
      const auto initial = extract_matrices(bundle.layers[i], *bundle.data[i].init);
      for (std::size_t s = 0; s < current.size(); ++s)
        init_distances.push_back((current[s].values - initial[s].values).norm());
    }
  }
  return aggregate_layer_metrics(bundle.model_id, per_matrix, init_distances);
}

std::string skip_reason_name(SkipReason r) {
  switch (r) {
    case SkipReason::too_small: return "too_small";
    case SkipReason::too_few_tail_points: return "too_few_tail_points";
  }
  return "unknown";
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "alpha_avg",        "quality_of_alpha_fit",   "log_spectral_norm",
      "log_frobenius_norm", "alpha_hat",            "log_alpha_shatten_norm",
      "distance_from_init"};
  return names;
}

std::optional<double> metric_value(const ModelMetrics& m, const std::string& name) {
  if (name == "alpha_avg") return m.alpha_avg;
  if (name == "quality_of_alpha_fit") return m.quality_of_alpha_fit;
  if (name == "log_spectral_norm") return m.log_spectral_norm;
  if (name == "log_frobenius_norm") return m.log_frobenius_norm;
  if (name == "alpha_hat") return m.alpha_hat;
  if (name == "log_alpha_shatten_norm") return m.log_alpha_shatten_norm;
  if (name == "distance_from_init") return m.distance_from_init;
  return std::nullopt;
}

}  // namespace specmet
