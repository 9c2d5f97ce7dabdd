#include "specmet/serialize.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "specmet/errors.hpp"
#include "specmet/plfit.hpp"

namespace specmet {
namespace {

using nlohmann::ordered_json;

// JSON has no -inf; emit null for anything non-finite
ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? number_or_null(*v) : ordered_json(nullptr);
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ordered_json to_json(const ModelMetrics& m) {
  ordered_json j;
  j["model_id"] = m.model_id;
  j["alpha_avg"] = number_or_null(m.alpha_avg);
  j["quality_of_alpha_fit"] = number_or_null(m.quality_of_alpha_fit);
  j["log_spectral_norm"] = number_or_null(m.log_spectral_norm);
  j["log_frobenius_norm"] = number_or_null(m.log_frobenius_norm);
  j["alpha_hat"] = number_or_null(m.alpha_hat);
  j["log_alpha_shatten_norm"] = number_or_null(m.log_alpha_shatten_norm);
  j["distance_from_init"] = optional_number(m.distance_from_init);
  j["n_matrices_used"] = m.n_matrices_used;
  j["n_matrices_skipped"] = m.n_matrices_skipped;
  return j;
}

ordered_json to_json(const LayerMetrics& lm) {
  ordered_json j;
  j["layer"] = lm.owner_layer;
  j["slice"] = lm.slice_index;
  j["rows"] = lm.rows;
  j["cols"] = lm.cols;
  j["lambda_max"] = number_or_null(lm.lambda_max);
  j["log10_spectral"] = number_or_null(lm.log10_spectral);
  j["log10_frobenius"] = number_or_null(lm.log10_frobenius);
  j["alpha"] = optional_number(lm.alpha);
  j["d_ks"] = optional_number(lm.d_ks);
  j["log10_alpha_shatten"] = optional_number(lm.log10_alpha_shatten);
  j["x_min"] = lm.fit ? number_or_null(lm.fit->x_min) : ordered_json(nullptr);
  j["n_tail"] = lm.fit ? ordered_json(lm.fit->n_tail) : ordered_json(nullptr);
  j["skipped"] = lm.skipped ? ordered_json(skip_reason_name(*lm.skipped)) : ordered_json(nullptr);
  j["warnings"] = ordered_json::array();
  j["notes"] = ordered_json::array();
  if (lm.fit) {
    for (const auto w : lm.fit->warnings) j["warnings"].push_back(fit_warning_name(w));
    for (const auto& n : lm.fit->notes) j["notes"].push_back(n);
  }
  return j;
}

ordered_json to_json(const CorrelationReport& report) {
  ordered_json j;
  j["metric"] = report.metric;
  j["target"] = report.target;
  const auto stats_json = [](const SubgroupStats& s, bool with_label) {
    ordered_json sj;
    sj["n"] = s.n;
    if (s.fit) {
      sj["slope"] = number_or_null(s.fit->slope);
      sj["intercept"] = number_or_null(s.fit->intercept);
      sj["r2"] = number_or_null(s.fit->r2);
      sj["rmse"] = number_or_null(s.fit->rmse);
      sj["kendall_tau"] = number_or_null(s.fit->tau);
    } else {
      sj["slope"] = nullptr;
      sj["intercept"] = nullptr;
      sj["r2"] = nullptr;
      sj["rmse"] = nullptr;
      sj["kendall_tau"] = nullptr;
    }
    if (with_label)
      sj["label"] = s.label ? ordered_json(correlation_label_name(*s.label)) : ordered_json(nullptr);
    return sj;
  };
  j["aggregate"] = stats_json(report.aggregate, false);
  j["subgroups"] = ordered_json::object();
  for (const auto& [name, stats] : report.per_subgroup)
    j["subgroups"][name] = stats_json(stats, true);
  ordered_json sj;
  sj["flagged"] = report.simpson.flagged;
  sj["strength"] = report.simpson.strength;
  sj["aggregate_sign"] = report.simpson.aggregate_sign;
  sj["subgroup_signs"] = ordered_json::object();
  for (const auto& [name, sign] : report.simpson.subgroup_signs)
    sj["subgroup_signs"][name] = sign;
  sj["evidence"] = report.simpson.evidence;
  j["simpson"] = sj;
  return j;
}

ordered_json analyze_json(const ModelBundle& bundle, const ModelMetrics& m,
                          const std::vector<LayerMetrics>& per_matrix) {
  ordered_json j = to_json(m);
  j["group"] = bundle.group;
  j["subgroup"] = bundle.subgroup;
  j["train_acc"] = optional_number(bundle.train_acc);
  j["test_acc"] = optional_number(bundle.test_acc);
  j["matrices"] = ordered_json::array();
  for (const auto& lm : per_matrix) j["matrices"].push_back(to_json(lm));
  return j;
}

void write_corpus_csv(const std::vector<CorpusRow>& rows, const std::filesystem::path& path) {
  std::set<std::string> hp_names;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.hyperparams) hp_names.insert(k);

  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "model_id,subgroup";
  for (const auto& h : hp_names) out << "," << h;
  for (const auto& m : metric_names()) out << "," << m;
  out << ",train_acc,test_acc\n";
  for (const auto& r : rows) {
    out << r.model_id << "," << r.subgroup;
    for (const auto& h : hp_names) {
      out << ",";
      if (auto it = r.hyperparams.find(h); it != r.hyperparams.end()) out << csv_number(it->second);
    }
    for (const auto& name : metric_names()) {
      out << ",";
      const auto v = metric_value(r.metrics, name);
      if (v && std::isfinite(*v)) out << csv_number(*v);
    }
    out << ",";
    if (r.train_acc) out << csv_number(*r.train_acc);
    out << ",";
    if (r.test_acc) out << csv_number(*r.test_acc);
    out << "\n";
  }
}

void write_subgroup_csv(const std::vector<std::pair<double, double>>& points,
                        const std::string& metric, const std::string& target,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << metric << "," << target << "\n";
  for (const auto& [x, y] : points) out << csv_number(x) << "," << csv_number(y) << "\n";
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace specmet
