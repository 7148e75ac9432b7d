#pragma once

// Two-sample tests behind the condition comparison: Mann-Whitney U (exact by
// enumeration for small tie-free samples, otherwise normal approximation with
// tie-corrected variance), two-sample Kolmogorov-Smirnov with the asymptotic
// p-value, and Welch's t.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "gaitkit/features.hpp"
#include "gaitkit/table.hpp"

namespace gaitkit {

enum class TestMethod { MannWhitney, KolmogorovSmirnov, WelchT };

struct TestResult {
  TestMethod method = TestMethod::MannWhitney;
  double statistic = 0.0;
  std::optional<double> p_value;
  bool ties_present = false;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;  // n-1 denominator, 0 when n == 1
  std::size_t n = 0;
};

inline SummaryStats summarize(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("summarize: empty sample");
  SummaryStats s;
  s.n = x.size();
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Survival function of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
/// Small arguments use the dual theta-series form, which converges where the
/// alternating series does not.
inline double kolmogorov_survival(double lambda) {
  const double u = std::abs(lambda);
  if (u < 0.2) return 1.0;
  if (u < 0.755) {
    static const double w = 2.50662827463100050;  // sqrt(2 pi)
    const double c1 = -std::numbers::pi * std::numbers::pi / 8.0;
    const double v = 1.0 / (u * u);
    return std::clamp(1.0 - w * (std::exp(c1 * v) + std::exp(9.0 * c1 * v) + std::exp(25.0 * c1 * v)) / u,
                      0.0, 1.0);
  }
  if (u >= 6.8116) return 0.0;
  const double v = u * u;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * v * static_cast<double>(j) * static_cast<double>(j));
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace detail {

/// Null distribution counts of the Mann-Whitney U for tie-free samples:
/// ways(a, b, u) = ways(a-1, b, u-b) + ways(a, b-1, u). Returns the number of
/// splits with U <= u_max alongside the total C(n1+n2, n1), both exact in
/// double (pooled size is capped at 20).
inline std::pair<double, double> mw_null_count_le(std::size_t n1, std::size_t n2, double u_max) {
  const std::size_t umax_all = n1 * n2;
  std::vector<double> table((n1 + 1) * (n2 + 1) * (umax_all + 1), 0.0);
  auto at = [&](std::size_t a, std::size_t b, std::size_t u) -> double& {
    return table[(a * (n2 + 1) + b) * (umax_all + 1) + u];
  };
  for (std::size_t b = 0; b <= n2; ++b) at(0, b, 0) = 1.0;
  for (std::size_t a = 1; a <= n1; ++a)
    for (std::size_t b = 0; b <= n2; ++b)
      for (std::size_t u = 0; u <= a * b; ++u) {
        double w = u >= b ? at(a - 1, b, u - b) : 0.0;
        if (b > 0) w += at(a, b - 1, u);
        at(a, b, u) = w;
      }
  double count_le = 0.0;
  double total = 0.0;
  for (std::size_t u = 0; u <= umax_all; ++u) {
    const double c = at(n1, n2, u);
    total += c;
    if (static_cast<double>(u) <= u_max) count_le += c;
  }
  return {count_le, total};
}

inline bool has_pooled_ties(std::span<const double> x, std::span<const double> y) {
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

}  // namespace detail

/// Mann-Whitney U test, two-sided. The statistic is U for x: the number of
/// (x_i, y_j) pairs with x_i > y_j, ties counting one half. The p-value is
/// exact (full enumeration of splits) when n1+n2 <= 20 and the pooled sample
/// is tie-free, otherwise a normal approximation with tie-corrected variance
/// and continuity correction.
inline TestResult mann_whitney(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney: empty sample");
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();

  double u = 0.0;
  for (double xi : x)
    for (double yj : y) {
      if (xi > yj)
        u += 1.0;
      else if (xi == yj)
        u += 0.5;
    }

  TestResult r;
  r.method = TestMethod::MannWhitney;
  r.statistic = u;
  r.n1 = n1;
  r.n2 = n2;
  r.ties_present = detail::has_pooled_ties(x, y);

  const double full = static_cast<double>(n1) * static_cast<double>(n2);
  if (n1 + n2 <= 20 && !r.ties_present) {
    const double u_low = std::min(u, full - u);
    const auto [count_le, total] = detail::mw_null_count_le(n1, n2, u_low);
    r.p_value = std::min(1.0, 2.0 * count_le / total);
    return r;
  }

  // tie-corrected normal approximation
  const double big_n = static_cast<double>(n1 + n2);
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double mu = full / 2.0;
  const double sigma2 = full / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (!(sigma2 > 0.0)) {
    r.p_value = 1.0;  // every pooled value identical
    return r;
  }
  const double diff = u - mu;
  const double cc = diff > 0.0 ? -0.5 : (diff < 0.0 ? 0.5 : 0.0);
  const double z = (diff + cc) / std::sqrt(sigma2);
  r.p_value = std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
  return r;
}

/// Two-sample Kolmogorov-Smirnov test. D is the exact sup-gap between the two
/// ECDFs; the p-value uses the asymptotic Kolmogorov distribution with the
/// standard effective-sample-size correction. When a value occurs in both
/// samples, ties_present marks the p-value as approximate (it is still
/// reported).
inline TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> sx(x.begin(), x.end());
  std::vector<double> sy(y.begin(), y.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  const double n1 = static_cast<double>(sx.size());
  const double n2 = static_cast<double>(sy.size());

  double d_stat = 0.0;
  bool cross_ties = false;
  std::size_t ix = 0;
  std::size_t iy = 0;
  while (ix < sx.size() || iy < sy.size()) {
    const double vx = ix < sx.size() ? sx[ix] : std::numeric_limits<double>::infinity();
    const double vy = iy < sy.size() ? sy[iy] : std::numeric_limits<double>::infinity();
    const double v = std::min(vx, vy);
    if (vx == v && vy == v) cross_ties = true;
    while (ix < sx.size() && sx[ix] == v) ++ix;
    while (iy < sy.size() && sy[iy] == v) ++iy;
    const double gap = std::abs(static_cast<double>(ix) / n1 - static_cast<double>(iy) / n2);
    d_stat = std::max(d_stat, gap);
  }

  TestResult r;
  r.method = TestMethod::KolmogorovSmirnov;
  r.statistic = d_stat;
  r.n1 = sx.size();
  r.n2 = sy.size();
  r.ties_present = cross_ties;
  const double ne = std::sqrt(n1 * n2 / (n1 + n2));
  r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d_stat);
  return r;
}

/// Welch's unequal-variance t test, two-sided, Satterthwaite degrees of
/// freedom. Zero variance in both samples is an error unless the means agree,
/// in which case t = 0 and p = 1.
inline TestResult welch_t(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2)
    throw std::invalid_argument("welch_t: need at least 2 samples per group");
  const auto a = summarize(x);
  const auto b = summarize(y);
  TestResult r;
  r.method = TestMethod::WelchT;
  r.n1 = a.n;
  r.n2 = b.n;
  r.ties_present = detail::has_pooled_ties(x, y);

  const double va = a.variance / static_cast<double>(a.n);
  const double vb = b.variance / static_cast<double>(b.n);
  if (!(va + vb > 0.0)) {
    if (a.mean == b.mean) {
      r.statistic = 0.0;
      r.p_value = 1.0;
      return r;
    }
    throw std::runtime_error("welch_t: zero pooled variance");
  }
  r.statistic = (a.mean - b.mean) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  boost::math::students_t_distribution<double> dist(df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(dist, -std::abs(r.statistic)));
  return r;
}

/// One comparison-table row. Display names and row order follow the
/// characteristic table of the report output.
struct ComparisonRow {
  std::string display_name;
  std::size_t feature_index = 0;
  std::optional<SummaryStats> tug;
  std::optional<SummaryStats> daily;
  std::optional<TestResult> ks;
  std::optional<TestResult> mw;
};

/// Report row order: indices into FeatureVector paired with display labels.
inline const std::vector<std::pair<std::size_t, std::string>>& comparison_row_order() {
  static const std::vector<std::pair<std::size_t, std::string>> order = {
      {0, "Speed"},
      {1, "Pace"},
      {2, "Speed var."},
      {3, "Stride time"},
      {4, "Stride time var."},
      {8, "Acceleration range"},
      {6, "Movement intensity"},
      {7, "Low freq. perc."},
      {5, "Stride freq."},
  };
  return order;
}

/// Per-characteristic condition comparison: summary statistics for both
/// conditions plus K-S and M-W tests (x = TUG sample, y = Daily sample).
/// A characteristic with data in only one condition keeps its summary but
/// gets no tests, with a warning; one with no data anywhere is dropped.
inline std::vector<ComparisonRow> compare_conditions(const FeatureTable& table,
                                                     std::vector<std::string>* warnings = nullptr) {
  std::vector<ComparisonRow> rows;
  for (const auto& [index, name] : comparison_row_order()) {
    const auto tug = feature_column(table, index, Condition::TUG);
    const auto daily = feature_column(table, index, Condition::Daily);
    if (tug.empty() && daily.empty()) continue;
    ComparisonRow row;
    row.display_name = name;
    row.feature_index = index;
    if (!tug.empty()) row.tug = summarize(tug);
    if (!daily.empty()) row.daily = summarize(daily);
    if (!tug.empty() && !daily.empty()) {
      row.ks = ks_two_sample(tug, daily);
      row.mw = mann_whitney(tug, daily);
    } else if (warnings) {
      warnings->push_back(name + ": present in only one condition, tests skipped");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gaitkit
