// Corpus-level correlation analysis: per-subgroup and aggregate trends of one
// metric against one accuracy target, plus a detector for trend reversals
// (subgroups agreeing on one sign while the pooled corpus shows the other).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specmet {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
};

enum class CorrelationLabel { None, Weak, Modest, Strong };

struct ModelRecord {
  std::string model_id;
  std::string subgroup;
  std::map<std::string, double> values;  // metric name -> value
  std::optional<double> train_acc;
  std::optional<double> test_acc;
};

struct TrendStats {
  int n = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
  double tau = 0.0;
};

struct SubgroupStats {
  int n = 0;
  std::optional<TrendStats> fit;  // absent when n < 3 or the metric is constant
  std::optional<CorrelationLabel> label;
};

struct SimpsonVerdict {
  bool flagged = false;
  double strength = 0.1;
  int aggregate_sign = 0;                    // sign of the aggregate tau
  std::map<std::string, int> subgroup_signs; // subgroups that have fits
  std::vector<std::string> evidence;         // subgroups with |tau| >= strength
};

struct CorrelationReport {
  std::string metric;
  std::string target;
  std::map<std::string, SubgroupStats> per_subgroup;
  SubgroupStats aggregate;  // label stays empty at the aggregate level
  SimpsonVerdict simpson;
};

// Ordinary least squares of y on x. R^2 is the squared Pearson correlation
// (0 when y is constant); RMSE is the root mean squared residual.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Kendall tau-b with tie corrections, O(n log n). When every pair is tied in
// x or in y the denominator vanishes and the result is defined as 0.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// |tau| < 0.05 -> None; else Strong if R^2 >= 0.6, Modest if R^2 >= 0.25,
// Weak otherwise.
CorrelationLabel classify_correlation(double r2, double tau);

std::string correlation_label_name(CorrelationLabel label);

// Looks up `name` among the record's metric values or its accuracy fields;
// absent or non-finite values disqualify the record from fits.
std::optional<double> record_value(const ModelRecord& record, const std::string& name);

CorrelationReport subgroup_report(const std::vector<ModelRecord>& records,
                                  const std::string& metric, const std::string& target,
                                  double simpson_strength = 0.1);

SimpsonVerdict detect_simpson(const CorrelationReport& report, double strength = 0.1);

}  // namespace specmet
