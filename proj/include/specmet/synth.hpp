// Seeded generators: truncated power-law samples, matrices with planted
// spectra, corpora with planted trend reversals, and small MLP/dataset pairs
// for exercising the evaluation path. Everything is driven by CounterRng, so
// one seed pins every byte of output.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "specmet/analysis.hpp"
#include "specmet/model_store.hpp"
#include "specmet/net_eval.hpp"

namespace specmet {

// Inverse CDF of the truncated power law; u in [0, 1] maps onto
// [x_min, x_max]. Requires alpha > 1.
double tpl_quantile(double alpha, double x_min, double x_max, double u);

// n iid draws by inverse-CDF sampling, in generation order.
Eigen::VectorXd sample_tpl(double alpha, double x_min, double x_max, int n, std::uint64_t seed);

// Deterministic spectrum: the (i - 0.5)/n quantiles, ascending. Useful when a
// planted exponent must survive refitting without sampling noise.
Eigen::VectorXd tpl_quantile_grid(double alpha, double x_min, double x_max, int n);

// W = U diag(sqrt(eigs)) V^T with U, V drawn Haar-ish from QR of Gaussian
// matrices; esd(W) reproduces `eigs` up to roundoff. len(eigs) must equal
// min(rows, cols).
WeightMatrix matrix_with_esd(const Eigen::VectorXd& eigs, int rows, int cols,
                             std::uint64_t seed);

struct SimpsonGeometry {
  double within_slope = -1.0;   // target change per unit metric inside a group, < 0
  double metric_offset = 2.0;   // metric gap between consecutive group centers
  double target_offset = 1.5;   // target gap between consecutive group centers
  double within_spread = 1.0;   // total metric range inside one group
  double noise = 0.0;           // sd of target jitter
  std::string metric_name = "alpha_avg";
};

// Records where every subgroup trends down while the pooled corpus trends up.
// Subgroups are named g0..g{n_groups-1}; the target lands in test_acc.
std::vector<ModelRecord> synth_simpson(int n_groups, int n_per_group,
                                       const SimpsonGeometry& geom, std::uint64_t seed);

// Same layout without the reversal: one shared positive trend across all
// groups. Used as the negative control.
std::vector<ModelRecord> synth_uniform_trend(int n_groups, int n_per_group, double slope,
                                             double noise, std::uint64_t seed);

// A model whose layers carry planted tail exponents (one per layer), built
// from quantile-grid spectra on [1, x_max].
ModelBundle make_tpl_model(const std::string& model_id, const std::vector<double>& alphas,
                           int rows, int cols, std::uint64_t seed);

// A corpus of planted-alpha models realizing the synth_simpson geometry in
// fitted metrics: within each group alpha rises while test_acc falls, across
// groups both centers rise.
std::vector<ModelBundle> make_simpson_corpus(int n_groups, int n_per_group, std::uint64_t seed);

// Linearly separable dataset plus a one-layer model that classifies it
// perfectly.
struct EvalCase {
  ModelBundle model;
  Dataset dataset;
};
EvalCase make_separable_case(int dim, int classes, int samples, std::uint64_t seed);

// Small relu MLP with decaying singular spectrum per layer, plus a matching
// dataset it classifies perfectly; exercises smoothing + evaluation.
EvalCase make_mlp_case(int dim, int hidden, int classes, int samples, std::uint64_t seed);

}  // namespace specmet
