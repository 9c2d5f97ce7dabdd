// JSON and CSV renderings of metrics and reports. All object keys and row
// orders are fixed so identical inputs serialize to identical bytes.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "specmet/analysis.hpp"
#include "specmet/metrics.hpp"
#include "specmet/model_store.hpp"

namespace specmet {

nlohmann::ordered_json to_json(const ModelMetrics& m);
nlohmann::ordered_json to_json(const LayerMetrics& lm);
nlohmann::ordered_json to_json(const CorrelationReport& report);

// Full analyze payload: model identity, metrics, per-matrix detail.
nlohmann::ordered_json analyze_json(const ModelBundle& bundle, const ModelMetrics& m,
                                    const std::vector<LayerMetrics>& per_matrix);

// One row per model: model_id, subgroup, hyperparams..., metrics, accuracies.
struct CorpusRow {
  std::string model_id;
  std::string subgroup;
  std::map<std::string, double> hyperparams;
  ModelMetrics metrics;
  std::optional<double> train_acc;
  std::optional<double> test_acc;
};
void write_corpus_csv(const std::vector<CorpusRow>& rows, const std::filesystem::path& path);

// Scatter data for one subgroup: metric column then target column.
void write_subgroup_csv(const std::vector<std::pair<double, double>>& points,
                        const std::string& metric, const std::string& target,
                        const std::filesystem::path& path);

// File-system safe version of a layer/slice identifier.
std::string sanitize_filename(const std::string& name);

}  // namespace specmet
