// Truncated power-law fits to ESD tails.
//
// The model density is rho(lambda) ~ lambda^(-alpha) supported on
// [x_min, x_max]. x_max is pinned to the largest eigenvalue, alpha comes from
// maximum likelihood, and x_min is chosen by scanning every candidate tail and
// keeping the one whose fitted CDF is closest to the empirical CDF in
// Kolmogorov-Smirnov distance.
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "specmet/spectra.hpp"

namespace specmet {

inline constexpr double kAlphaSearchMin = 1.01;
inline constexpr double kAlphaSearchMax = 12.0;
inline constexpr double kAlphaSearchTol = 1e-4;
inline constexpr int kDefaultMinTail = 10;
// fitted exponents above this get a quality note: the tail is so steep the
// truncated fit carries little information
inline constexpr double kAlphaQualityNote = 6.0;

enum class FitWarning { too_few_tail_points, alpha_at_search_bound, degenerate_tail };

struct ScanPoint {
  double x_min = 0.0;
  double alpha = 0.0;
  double d_ks = 0.0;
};

struct AlphaFit {
  double alpha = 0.0;
  bool at_search_bound = false;
};

struct TPLFit {
  double alpha = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double d_ks = 0.0;
  int n_tail = 0;
  std::vector<ScanPoint> scan;  // one entry per candidate x_min, ascending
  std::set<FitWarning> warnings;
  std::vector<std::string> notes;
};

// CDF of the truncated power law at x in [x_min, x_max]. Uses the log form
// when |alpha - 1| < 1e-6.
double tpl_cdf(double x, double alpha, double x_min, double x_max);

// Maximum-likelihood alpha over [kAlphaSearchMin, kAlphaSearchMax] by
// golden-section search (the likelihood is concave in alpha). `tail` must be
// sorted ascending with every value inside [x_min, x_max].
AlphaFit fit_alpha_mle(const std::vector<double>& tail, double x_min, double x_max);

// Two-sided exact KS distance between the empirical CDF of `tail` (sorted
// ascending) and the fitted CDF.
double ks_distance(const std::vector<double>& tail, double alpha, double x_min, double x_max);

TPLFit fit_tpl(const ESD& e, int min_tail = kDefaultMinTail);

std::string fit_warning_name(FitWarning w);

// Writes the scan as CSV with header "x_min,alpha,d_ks".
void write_scan_csv(const TPLFit& fit, const std::filesystem::path& path);

}  // namespace specmet
