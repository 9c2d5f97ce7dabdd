#include "specmet/plfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "specmet/errors.hpp"

namespace specmet {
namespace {

// Log-likelihood per point, up to the alpha-independent constant -log(x_min).
// Working in ratio space r = x / x_min makes the optimum exactly scale
// invariant: beta = alpha - 1, R = x_max / x_min,
//   g(alpha) = log C(alpha) - alpha * mean_log_r
//   C(alpha) = beta / (1 - R^-beta)
double log_likelihood_rate(double alpha, double log_ratio_range, double mean_log_ratio) {
  const double beta = alpha - 1.0;
  const double log_norm = std::log(beta) - std::log(-std::expm1(-beta * log_ratio_range));
  return log_norm - alpha * mean_log_ratio;
}

void check_tail(const std::vector<double>& tail, double x_min, double x_max) {
  if (tail.empty()) throw DomainError("tail is empty");
  if (!(x_min > 0.0)) throw DomainError("x_min must be > 0");
  if (!(x_max > x_min)) throw DomainError("x_max must exceed x_min");
  if (!std::is_sorted(tail.begin(), tail.end()))
    throw DomainError("tail must be sorted ascending");
  if (tail.front() < x_min || tail.back() > x_max)
    throw DomainError("tail values must lie in [x_min, x_max]");
}

}  // namespace

double tpl_cdf(double x, double alpha, double x_min, double x_max) {
  if (!(alpha > 0.0)) throw DomainError("tpl_cdf: alpha must be > 0");
  if (!(x_min > 0.0)) throw DomainError("tpl_cdf: x_min must be > 0");
  if (!(x_max > x_min)) throw DomainError("tpl_cdf: x_max must exceed x_min");
  if (x < x_min || x > x_max)
    throw DomainError("tpl_cdf: x outside [x_min, x_max]");
  const double log_r = std::log(x / x_min);
  const double log_range = std::log(x_max / x_min);
  if (std::abs(alpha - 1.0) < 1e-6) return log_r / log_range;
  const double c = 1.0 - alpha;
  return std::expm1(c * log_r) / std::expm1(c * log_range);
}

AlphaFit fit_alpha_mle(const std::vector<double>& tail, double x_min, double x_max) {
  check_tail(tail, x_min, x_max);
  double sum_log = 0.0;
  for (double v : tail) sum_log += std::log(v / x_min);
  const double mean_log = sum_log / static_cast<double>(tail.size());
  const double log_range = std::log(x_max / x_min);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kAlphaSearchMin, b = kAlphaSearchMax;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double gc = log_likelihood_rate(c, log_range, mean_log);
  double gd = log_likelihood_rate(d, log_range, mean_log);
  while (b - a > kAlphaSearchTol) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = log_likelihood_rate(c, log_range, mean_log);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = log_likelihood_rate(d, log_range, mean_log);
    }
  }
  AlphaFit fit;
  fit.alpha = 0.5 * (a + b);
  if (fit.alpha - kAlphaSearchMin < 2.0 * kAlphaSearchTol) {
    fit.alpha = kAlphaSearchMin;
    fit.at_search_bound = true;
  } else if (kAlphaSearchMax - fit.alpha < 2.0 * kAlphaSearchTol) {
    fit.alpha = kAlphaSearchMax;
    fit.at_search_bound = true;
  }
  return fit;
}

double ks_distance(const std::vector<double>& tail, double alpha, double x_min, double x_max) {
  check_tail(tail, x_min, x_max);
  const double n = static_cast<double>(tail.size());
  double d = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double f = tpl_cdf(tail[i], alpha, x_min, x_max);
    const double hi = static_cast<double>(i + 1) / n;
    const double lo = static_cast<double>(i) / n;
    d = std::max({d, std::abs(f - hi), std::abs(f - lo)});
  }
  return d;
}

TPLFit fit_tpl(const ESD& e, int min_tail) {
  if (min_tail < 2) throw DomainError("min_tail must be >= 2");
  std::vector<double> pos;
  pos.reserve(static_cast<std::size_t>(e.n()));
  for (Eigen::Index i = 0; i < e.n(); ++i)
    if (e.eigenvalues[i] > 0.0) pos.push_back(e.eigenvalues[i]);
  if (static_cast<int>(pos.size()) < min_tail)
    throw TooFewTailPointsError("only " + std::to_string(pos.size()) +
                                " positive eigenvalues in '" + e.owner_layer + "' slice " +
                                std::to_string(e.slice_index) + ", need " +
                                std::to_string(min_tail));

  const double x_max = pos.back();
  TPLFit best;
  best.x_max = x_max;
  bool have_best = false;
  bool best_degenerate = false;

  for (std::size_t i = 0; i < pos.size();) {
    const double cand = pos[i];
    const std::size_t n_tail = pos.size() - i;
    if (static_cast<int>(n_tail) < min_tail) break;
    std::vector<double> tail(pos.begin() + static_cast<std::ptrdiff_t>(i), pos.end());

    double alpha, d;
    bool at_bound, degenerate = false;
    if (cand == x_max) {
      // zero-width support: every tail point sits at x_max; fit against an
      // epsilon-widened upper edge so the likelihood is defined
      const double widened = x_max * (1.0 + 1e-9);
      const AlphaFit af = fit_alpha_mle(tail, cand, widened);
      alpha = af.alpha;
      at_bound = af.at_search_bound;
      d = ks_distance(tail, alpha, cand, widened);
      degenerate = true;
    } else {
      const AlphaFit af = fit_alpha_mle(tail, cand, x_max);
      alpha = af.alpha;
      at_bound = af.at_search_bound;
      d = ks_distance(tail, alpha, cand, x_max);
    }
    best.scan.push_back({cand, alpha, d});
    if (!have_best || d < best.d_ks) {
      have_best = true;
      best.alpha = alpha;
      best.x_min = cand;
      best.d_ks = d;
      best.n_tail = static_cast<int>(n_tail);
      best_degenerate = degenerate;
      best.warnings.clear();
      if (at_bound) best.warnings.insert(FitWarning::alpha_at_search_bound);
      if (degenerate) best.warnings.insert(FitWarning::degenerate_tail);
    }
    // advance past duplicates of this candidate
    while (i < pos.size() && pos[i] == cand) ++i;
  }

  if (!have_best)
    throw TooFewTailPointsError("no candidate tail of size >= " + std::to_string(min_tail) +
                                " in '" + e.owner_layer + "' slice " +
                                std::to_string(e.slice_index));
  if (best.alpha > kAlphaQualityNote && !best_degenerate)
    best.notes.push_back("alpha above " + std::to_string(static_cast<int>(kAlphaQualityNote)) +
                         ": steep tail, fit may say little about the spectrum");
  return best;
}

std::string fit_warning_name(FitWarning w) {
  switch (w) {
    case FitWarning::too_few_tail_points: return "too_few_tail_points";
    case FitWarning::alpha_at_search_bound: return "alpha_at_search_bound";
    case FitWarning::degenerate_tail: return "degenerate_tail";
  }
  return "unknown";
}

void write_scan_csv(const TPLFit& fit, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "x_min,alpha,d_ks\n";
  out.precision(17);
  for (const auto& p : fit.scan) out << p.x_min << "," << p.alpha << "," << p.d_ks << "\n";
}

}  // namespace specmet
