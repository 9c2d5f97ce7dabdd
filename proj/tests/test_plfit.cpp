#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "specmet/errors.hpp"
#include "specmet/plfit.hpp"
#include "specmet/rng.hpp"
#include "specmet/synth.hpp"

using namespace specmet;

namespace {

std::vector<double> sorted_sample(double alpha, double x_min, double x_max, int n,
                                  std::uint64_t seed) {
  const Eigen::VectorXd v = sample_tpl(alpha, x_min, x_max, n, seed);
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("tpl_cdf closed-form values") {
  // alpha = 2 on [1, 2]: F(x) = (1 - 1/x) / (1 - 1/2), so F(4/3) = 1/2
  CHECK(tpl_cdf(4.0 / 3.0, 2.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tpl_cdf(1.0, 2.0, 1.0, 2.0) == doctest::Approx(0.0));
  CHECK(tpl_cdf(2.0, 2.0, 1.0, 2.0) == doctest::Approx(1.0));

  // alpha = 1 log branch on [1, e^2]: F(x) = ln x / 2, so F(e) = 1/2
  const double e1 = std::exp(1.0), e2 = std::exp(2.0);
  CHECK(tpl_cdf(e1, 1.0, 1.0, e2) == doctest::Approx(0.5).epsilon(1e-12));

  // just off the log branch the two forms agree
  CHECK(tpl_cdf(e1, 1.0 + 1e-7, 1.0, e2) ==
        doctest::Approx(tpl_cdf(e1, 1.0 + 1e-5, 1.0, e2)).epsilon(1e-4));
}

TEST_CASE("tpl_cdf is monotone and hits both endpoints") {
  double prev = tpl_cdf(1.0, 3.2, 1.0, 50.0);
  CHECK(prev == 0.0);
  for (int i = 1; i <= 100; ++i) {
    const double x = 1.0 + 49.0 * i / 100.0;
    const double f = tpl_cdf(x, 3.2, 1.0, 50.0);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(prev == doctest::Approx(1.0));
}

TEST_CASE("tpl_cdf rejects out-of-domain arguments") {
  CHECK_THROWS_AS(tpl_cdf(0.5, 2.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(tpl_cdf(2.5, 2.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(tpl_cdf(1.5, -1.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(tpl_cdf(1.5, 2.0, 0.0, 2.0), DomainError);
  CHECK_THROWS_AS(tpl_cdf(1.5, 2.0, 2.0, 1.0), DomainError);
}

TEST_CASE("mle recovers a planted exponent and matches a dense grid search") {
  const auto tail = sorted_sample(2.5, 1.0, 100.0, 5000, 7);
  const AlphaFit fit = fit_alpha_mle(tail, 1.0, 100.0);
  CHECK(!fit.at_search_bound);
  CHECK(fit.alpha > 2.45);
  CHECK(fit.alpha < 2.55);

  const double grid = oracles::grid_alpha_mle(tail, 1.0, 100.0);
  CHECK(std::abs(fit.alpha - grid) < 2e-3);
}

TEST_CASE("mle agrees with the grid oracle across exponents") {
  for (double alpha : {1.3, 3.0, 5.5}) {
    const auto tail = sorted_sample(alpha, 2.0, 200.0, 2000, 11);
    const AlphaFit fit = fit_alpha_mle(tail, 2.0, 200.0);
    const double grid = oracles::grid_alpha_mle(tail, 2.0, 200.0);
    CHECK(std::abs(fit.alpha - grid) < 2e-3);
  }
}

TEST_CASE("mle is exactly scale invariant") {
  const auto base = sorted_sample(3.1, 1.0, 80.0, 800, 21);
  const AlphaFit ref = fit_alpha_mle(base, 1.0, 80.0);
  for (double c : {3.7, 1e6}) {
    std::vector<double> scaled = base;
    for (auto& v : scaled) v *= c;
    const AlphaFit got = fit_alpha_mle(scaled, 1.0 * c, 80.0 * c);
    CHECK(std::abs(got.alpha - ref.alpha) < 1e-9);
  }
}

TEST_CASE("with a huge upper cutoff the mle approaches the closed-form limit") {
  const auto tail = sorted_sample(2.2, 1.0, 50.0, 3000, 5);
  const double x_max = 1e12 * tail.back();
  const AlphaFit fit = fit_alpha_mle(tail, 1.0, x_max);

  double sum_log = 0.0;
  for (double v : tail) sum_log += std::log(v);
  const double closed_form = 1.0 + static_cast<double>(tail.size()) / sum_log;
  CHECK(std::abs(fit.alpha - closed_form) < 1e-3);
}

TEST_CASE("mle validates its inputs") {
  CHECK_THROWS_AS(fit_alpha_mle({}, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(fit_alpha_mle({1.5, 1.2}, 1.0, 2.0), DomainError);   // unsorted
  CHECK_THROWS_AS(fit_alpha_mle({0.5, 1.5}, 1.0, 2.0), DomainError);   // below x_min
  CHECK_THROWS_AS(fit_alpha_mle({1.2, 2.5}, 1.0, 2.0), DomainError);   // above x_max
  CHECK_THROWS_AS(fit_alpha_mle({1.2, 1.5}, 2.0, 1.0), DomainError);   // inverted range
}

TEST_CASE("ks distance of a single mid-CDF point is one half") {
  // F(4/3) = 0.5 for alpha = 2 on [1, 2]; the empirical CDF jumps 0 -> 1 there
  const double d = ks_distance({4.0 / 3.0}, 2.0, 1.0, 2.0);
  CHECK(d == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("points placed at exact quantiles give the minimal ks distance") {
  const int n = 100;
  std::vector<double> tail;
  for (int i = 1; i <= n; ++i) {
    const double u = (i - 0.5) / n;
    tail.push_back(tpl_quantile(2.5, 1.0, 40.0, u));
  }
  const double d = ks_distance(tail, 2.5, 1.0, 40.0);
  CHECK(d == doctest::Approx(0.5 / n).epsilon(1e-7));
}

TEST_CASE("ks distance grows with model mismatch") {
  int worse = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto tail = sorted_sample(2.0, 1.0, 60.0, 1000, 100 + seed);
    const double d_true = ks_distance(tail, 2.0, 1.0, 60.0);
    const double d_off = ks_distance(tail, 4.0, 1.0, 60.0);
    if (d_off > d_true) ++worse;
  }
  CHECK(worse == 20);
}

TEST_CASE("fit_tpl recovers alpha and x_min on a pure quantile-grid spectrum") {
  const Eigen::VectorXd eigs = tpl_quantile_grid(3.0, 1.0, 1e4, 400);
  const TPLFit fit = fit_tpl(esd_from_eigenvalues(eigs));

  CHECK(fit.alpha == doctest::Approx(3.0).epsilon(0.02));
  CHECK(fit.x_max == eigs[eigs.size() - 1]);
  CHECK(fit.warnings.empty());
  CHECK(fit.notes.empty());

  // on a pure tail the best x_min sits near the very bottom of the scan
  const auto it = std::find_if(fit.scan.begin(), fit.scan.end(),
                               [&](const ScanPoint& p) { return p.x_min == fit.x_min; });
  REQUIRE(it != fit.scan.end());
  const auto idx = static_cast<std::size_t>(it - fit.scan.begin());
  CHECK(idx < fit.scan.size() / 4);

  // the reported d_ks is the scan minimum, and ties go to the smallest x_min
  double best = fit.scan.front().d_ks;
  for (const auto& p : fit.scan) best = std::min(best, p.d_ks);
  CHECK(fit.d_ks == best);
  for (const auto& p : fit.scan) {
    if (p.d_ks == fit.d_ks) {
      CHECK(p.x_min == fit.x_min);  // first minimum wins
      break;
    }
  }
}

TEST_CASE("fit_tpl finds the tail boundary under a bulk") {
  // bulk: uniform mass well below the tail start; tail: TPL on [2, 50]
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(900 + seed, 12);
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) values.push_back(0.01 + 1.49 * rng.next_unit());
    const Eigen::VectorXd tail = sample_tpl(3.0, 2.0, 50.0, 3000, 901 + seed);
    for (Eigen::Index i = 0; i < tail.size(); ++i) values.push_back(tail[i]);

    Eigen::VectorXd eigs =
        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    const TPLFit fit = fit_tpl(esd_from_eigenvalues(eigs));
    if (fit.x_min >= 1.5 && fit.x_min <= 3.0) ++inside;
  }
  CHECK(inside >= 4);
}

TEST_CASE("fit_tpl is scale covariant") {
  const Eigen::VectorXd eigs = tpl_quantile_grid(2.6, 1.0, 5e3, 300);
  const TPLFit ref = fit_tpl(esd_from_eigenvalues(eigs));
  for (double c : {3.7, 1e6}) {
    const TPLFit got = fit_tpl(esd_from_eigenvalues(c * eigs));
    CHECK(std::abs(got.alpha - ref.alpha) < 1e-9);
    CHECK(std::abs(got.x_min / c - ref.x_min) / ref.x_min < 1e-9);
    CHECK(got.n_tail == ref.n_tail);
  }
}

TEST_CASE("a constant spectrum is fitted against a widened edge and flagged") {
  Eigen::VectorXd eigs = Eigen::VectorXd::Constant(12, 5.0);
  const TPLFit fit = fit_tpl(esd_from_eigenvalues(eigs));
  CHECK(fit.alpha == kAlphaSearchMax);
  CHECK(fit.x_min == 5.0);
  CHECK(fit.x_max == 5.0);
  CHECK(fit.d_ks == doctest::Approx(1.0));
  CHECK(fit.n_tail == 12);
  CHECK(fit.warnings.count(FitWarning::degenerate_tail) == 1);
  CHECK(fit.warnings.count(FitWarning::alpha_at_search_bound) == 1);
  CHECK(fit.notes.empty());  // degenerate fits skip the steep-tail note
}

TEST_CASE("steep tails get a quality note") {
  const Eigen::VectorXd eigs = tpl_quantile_grid(7.0, 1.0, 1e3, 400);
  const TPLFit fit = fit_tpl(esd_from_eigenvalues(eigs));
  CHECK(fit.alpha > 6.0);
  CHECK(!fit.notes.empty());

  const Eigen::VectorXd mild = tpl_quantile_grid(3.0, 1.0, 1e3, 400);
  CHECK(fit_tpl(esd_from_eigenvalues(mild)).notes.empty());
}

TEST_CASE("too few positive eigenvalues refuse to fit") {
  Eigen::VectorXd eigs(12);
  eigs << 0, 0, 0, 0, 0, 0, 0, 0, 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(fit_tpl(esd_from_eigenvalues(eigs)), TooFewTailPointsError);
  CHECK_NOTHROW(fit_tpl(esd_from_eigenvalues(eigs), 4));
}

TEST_CASE("min_tail below 2 is rejected") {
  Eigen::VectorXd eigs = tpl_quantile_grid(2.0, 1.0, 10.0, 50);
  CHECK_THROWS_AS(fit_tpl(esd_from_eigenvalues(eigs), 1), DomainError);
}

TEST_CASE("scan csv lists every candidate with the header") {
  const Eigen::VectorXd eigs = tpl_quantile_grid(2.4, 1.0, 100.0, 60);
  const TPLFit fit = fit_tpl(esd_from_eigenvalues(eigs));
  const auto path = std::filesystem::temp_directory_path() / "specmet_scan_test.csv";
  write_scan_csv(fit, path);

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "x_min,alpha,d_ks");
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == fit.scan.size());
}

TEST_CASE("alpha recovery is unbiased enough across seeds") {
  double abs_err_sum = 0.0;
  const int seeds = 10;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto tail = sorted_sample(2.8, 1.0, 150.0, 2500, 40 + s);
    abs_err_sum += std::abs(fit_alpha_mle(tail, 1.0, 150.0).alpha - 2.8);
  }
  CHECK(abs_err_sum / seeds < 0.08);
}
