#include "specmet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "specmet/errors.hpp"

namespace specmet {
namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// merge sort counting inversions in y
std::uint64_t count_inversions(std::vector<double>& y, std::vector<double>& tmp,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(y, tmp, lo, mid) + count_inversions(y, tmp, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (y[b] < y[a]) {
      inv += mid - a;
      tmp[out++] = y[b++];
    } else {
      tmp[out++] = y[a++];
    }
  }
  while (a < mid) tmp[out++] = y[a++];
  while (b < hi) tmp[out++] = y[b++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
            tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

std::uint64_t tie_pairs(const std::vector<double>& v) {
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const std::uint64_t t = j - i;
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

TrendStats trend_stats(const std::vector<double>& x, const std::vector<double>& y) {
  const LinearFit lf = linear_fit(x, y);
  TrendStats s;
  s.n = static_cast<int>(x.size());
  s.slope = lf.slope;
  s.intercept = lf.intercept;
  s.r2 = lf.r2;
  s.rmse = lf.rmse;
  s.tau = kendall_tau(x, y);
  return s;
}

// report n; fit only if there are enough points and the fit is nondegenerate
SubgroupStats make_stats(const std::vector<double>& x, const std::vector<double>& y,
                         bool with_label) {
  SubgroupStats s;
  s.n = static_cast<int>(x.size());
  if (s.n < 3) return s;
  try {
    s.fit = trend_stats(x, y);
  } catch (const Error&) {
    return s;
  }
  if (with_label) s.label = classify_correlation(s.fit->r2, s.fit->tau);
  return s;
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("linear_fit: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw InsufficientDataError("linear_fit needs at least 3 points, got " +
                                         std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw NumericError("linear_fit: x is constant, slope undefined");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 0.0 : (sxy * sxy) / (sxx * syy);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.rmse = std::sqrt(ss / static_cast<double>(n));
  return f;
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("kendall_tau: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientDataError("kendall_tau needs at least 2 points");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DataError("kendall_tau: non-finite input");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tie_pairs(xs);
  std::uint64_t n3 = 0;  // joint ties
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) ++j;
      const std::uint64_t t = j - i;
      n3 += t * (t - 1) / 2;
      i = j;
    }
  }
  std::vector<double> tmp(n);
  const std::uint64_t swaps = count_inversions(ys, tmp, 0, n);  // ys now sorted
  const std::uint64_t n2 = tie_pairs(ys);

  if (n0 == n1 || n0 == n2) return 0.0;  // all tied on one axis
  // concordant minus discordant
  const double s = static_cast<double>(static_cast<std::int64_t>(n0) -
                                       static_cast<std::int64_t>(n1) -
                                       static_cast<std::int64_t>(n2) +
                                       static_cast<std::int64_t>(n3) -
                                       2 * static_cast<std::int64_t>(swaps));
  return s / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

CorrelationLabel classify_correlation(double r2, double tau) {
  if (std::abs(tau) < 0.05) return CorrelationLabel::None;
  if (r2 >= 0.6) return CorrelationLabel::Strong;
  if (r2 >= 0.25) return CorrelationLabel::Modest;
  return CorrelationLabel::Weak;
}

std::string correlation_label_name(CorrelationLabel label) {
  switch (label) {
    case CorrelationLabel::None: return "None";
    case CorrelationLabel::Weak: return "Weak";
    case CorrelationLabel::Modest: return "Modest";
    case CorrelationLabel::Strong: return "Strong";
  }
  return "None";
}

std::optional<double> record_value(const ModelRecord& record, const std::string& name) {
  std::optional<double> v;
  if (name == "test_acc") v = record.test_acc;
  else if (name == "train_acc") v = record.train_acc;
  else if (auto it = record.values.find(name); it != record.values.end()) v = it->second;
  if (v && !std::isfinite(*v)) return std::nullopt;
  return v;
}

CorrelationReport subgroup_report(const std::vector<ModelRecord>& records,
                                  const std::string& metric, const std::string& target,
                                  double simpson_strength) {
  struct Usable {
    const ModelRecord* rec;
    double x, y;
  };
  std::vector<Usable> usable;
  for (const auto& r : records) {
    const auto x = record_value(r, metric);
    const auto y = record_value(r, target);
    if (x && y && !r.subgroup.empty()) usable.push_back({&r, *x, *y});
  }
  if (usable.empty())
    throw InsufficientDataError("no usable records for metric '" + metric + "' vs '" + target +
                                "'");
  std::sort(usable.begin(), usable.end(), [](const Usable& a, const Usable& b) {
    if (a.rec->model_id != b.rec->model_id) return a.rec->model_id < b.rec->model_id;
    return a.rec->subgroup < b.rec->subgroup;
  });

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<double> ax, ay;
  for (const auto& u : usable) {
    groups[u.rec->subgroup].first.push_back(u.x);
    groups[u.rec->subgroup].second.push_back(u.y);
    ax.push_back(u.x);
    ay.push_back(u.y);
  }

  CorrelationReport report;
  report.metric = metric;
  report.target = target;
  for (const auto& [name, xy] : groups)
    report.per_subgroup[name] = make_stats(xy.first, xy.second, true);
  report.aggregate = make_stats(ax, ay, false);
  report.simpson = detect_simpson(report, simpson_strength);
  return report;
}

SimpsonVerdict detect_simpson(const CorrelationReport& report, double strength) {
  if (!(strength > 0.0)) throw DomainError("detect_simpson: strength must be > 0");
  SimpsonVerdict v;
  v.strength = strength;
  int shared_sign = 0;
  bool consistent = true;
  for (const auto& [name, stats] : report.per_subgroup) {
    if (!stats.fit) continue;
    const double tau = stats.fit->tau;
    v.subgroup_signs[name] = sign_of(tau);
    if (std::abs(tau) >= strength) {
      v.evidence.push_back(name);
      if (shared_sign == 0) shared_sign = sign_of(tau);
      else if (shared_sign != sign_of(tau)) consistent = false;
    }
  }
  if (report.aggregate.fit) v.aggregate_sign = sign_of(report.aggregate.fit->tau);
  v.flagged = consistent && v.evidence.size() >= 2 && shared_sign != 0 &&
              report.aggregate.fit && std::abs(report.aggregate.fit->tau) >= strength &&
              v.aggregate_sign == -shared_sign;
  return v;
}

}  // namespace specmet
