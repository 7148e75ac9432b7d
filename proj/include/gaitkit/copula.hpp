#pragma once

// Copula entropy by the two-step rank / k-nearest-neighbor route:
//
//   1. rank-transform each variable to pseudo-observations in (0,1), which
//      samples the empirical copula;
//   2. estimate the mutual information of the pseudo-observations with the
//      digamma-based k-NN estimator (max-norm joint balls, strict marginal
//      counts), and negate it.
//
// The estimate is in nats, non-positive in expectation and 0 iff the
// variables are independent. Because only ranks enter, the value is exactly
// invariant under strictly increasing per-column transforms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "gaitkit/core.hpp"
#include "gaitkit/rng.hpp"
#include "gaitkit/table.hpp"

namespace gaitkit {

/// n observations of d >= 2 real variables, column-major.
struct SampleMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t n() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t d() const { return columns.size(); }

  void validate() const {
    if (d() < 2) throw std::invalid_argument("SampleMatrix: need at least 2 columns");
    for (const auto& col : columns) {
      if (col.size() != n()) throw std::invalid_argument("SampleMatrix: ragged columns");
      for (double v : col)
        if (!std::isfinite(v)) throw std::invalid_argument("SampleMatrix: non-finite value");
    }
  }
};

/// Rank-scaled data: entry (i,j) is rank_j(i) / (n+1), strictly inside (0,1).
/// Tied values share the average rank of their block.
struct PseudoObservations {
  std::vector<std::vector<double>> columns;

  std::size_t n() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t d() const { return columns.size(); }
};

struct CEEstimate {
  double value_nats = 0.0;
  int k = 3;
  std::size_t n = 0;
};

/// Average ranks of one column, scaled by 1/(n+1).
inline std::vector<double> rank_column(std::span<const double> col) {
  const std::size_t n = col.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (col[a] != col[b]) return col[a] < col[b];
    return a < b;
  });
  std::vector<double> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && col[order[j + 1]] == col[order[i]]) ++j;
    // ranks are 1-based; a tie block [i, j] gets the block's average rank
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg_rank / static_cast<double>(n + 1);
    i = j + 1;
  }
  return out;
}

inline PseudoObservations rank_transform(const SampleMatrix& data) {
  data.validate();
  PseudoObservations u;
  u.columns.reserve(data.d());
  for (const auto& col : data.columns) u.columns.push_back(rank_column(col));
  return u;
}

/// Largest tie-block fraction across columns (block size / n).
inline double max_tie_fraction(const PseudoObservations& u) {
  double worst = 0.0;
  for (const auto& col : u.columns) {
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      worst = std::max(worst, static_cast<double>(j - i + 1) / static_cast<double>(sorted.size()));
      i = j + 1;
    }
  }
  return worst;
}

/// k-NN mutual information of pseudo-observations (nats). For each point the
/// max-norm distance to its k-th neighbor in the joint space is found by full
/// scan, then each marginal counts neighbors strictly inside that distance:
///
///   MI = psi(k) + (d-1) psi(n) - < sum_j psi(n_j + 1) >
///
/// Deterministic: neighbor selection depends only on distances, and marginal
/// counts use sorted-column binary search.
inline double ksg_mutual_information(const PseudoObservations& u, int k = 3) {
  const std::size_t n = u.n();
  const std::size_t d = u.d();
  if (d < 2) throw std::invalid_argument("ksg: need at least 2 dimensions");
  if (k < 1) throw std::invalid_argument("ksg: k must be >= 1");
  if (n <= static_cast<std::size_t>(k) + 1)
    throw std::invalid_argument("ksg: need more than k+1 samples");

  // Sorted copy of each marginal for O(log n) strict-interval counts.
  std::vector<std::vector<double>> sorted(d);
  for (std::size_t j = 0; j < d; ++j) {
    sorted[j] = u.columns[j];
    std::sort(sorted[j].begin(), sorted[j].end());
  }

  const double psi_k = boost::math::digamma(static_cast<double>(k));
  const double psi_n = boost::math::digamma(static_cast<double>(n));
  double acc = 0.0;

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      double dm = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        dm = std::max(dm, std::abs(u.columns[j][m] - u.columns[j][i]));
      dist[m] = dm;
    }
    dist[i] = std::numeric_limits<double>::infinity();  // exclude self
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    const double eps = dist[k - 1];

    // per-point sum first, so a two-column swap gives a bitwise-equal result
    double point_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = u.columns[j][i];
      const auto lo = std::upper_bound(sorted[j].begin(), sorted[j].end(), c - eps);
      const auto hi = std::lower_bound(sorted[j].begin(), sorted[j].end(), c + eps);
      // strict |x - c| < eps, minus the point itself
      const auto inside = static_cast<std::size_t>(hi - lo);
      const std::size_t n_j = inside > 0 ? inside - 1 : 0;
      point_sum += boost::math::digamma(static_cast<double>(n_j + 1));
    }
    acc += point_sum;
  }
  return psi_k + static_cast<double>(d - 1) * psi_n - acc / static_cast<double>(n);
}

struct CeOptions {
  int k = 3;
  bool jitter_ties = true;               // seeded sub-resolution dither of the pseudo-observations
  std::uint64_t jitter_seed = 0;
  double tie_warn_fraction = 0.01;       // tie block size / n that triggers the warning
};

namespace detail {

/// Seeded dither of magnitude 1e-10, keyed by (seed, row) and shared across
/// columns. Rank-scaled values sit on an exact grid, so pair distances tie bit
/// for bit far more often than continuous data would; the strict marginal
/// count then systematically excludes points sitting exactly at the k-NN
/// radius, which biases the estimate. The dither restores continuous-like
/// behavior. Keying by row only keeps a column swap bitwise symmetric, and
/// keying by rank position (not value) keeps strictly increasing marginal
/// transforms bitwise invariant. It also separates exact ties left by
/// average ranks.
inline void jitter_pseudo_observations(PseudoObservations& u, std::uint64_t seed) {
  for (std::size_t i = 0; i < u.n(); ++i) {
    const std::uint64_t h = mix_seed(seed, i + 1);
    const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
    const double offset = (unit - 0.5) * 1e-10;
    for (auto& col : u.columns) col[i] += offset;
  }
}

}  // namespace detail

/// Copula entropy of the sample: CE = -MI of the rank-transformed data.
/// A warning is appended (when a sink is given) if any column's largest tie
/// block exceeds tie_warn_fraction of n.
inline CEEstimate copula_entropy(const SampleMatrix& data, const CeOptions& opts = {},
                                 std::vector<std::string>* warnings = nullptr) {
  PseudoObservations u = rank_transform(data);
  if (warnings && max_tie_fraction(u) > opts.tie_warn_fraction) {
    std::string label = data.names.empty() ? std::string("copula input") : data.names.front();
    for (std::size_t i = 1; i < data.names.size(); ++i) label += "/" + data.names[i];
    warnings->push_back("heavy ties in " + label +
                        (opts.jitter_ties ? "; seeded jitter applied" : "; estimate degraded"));
  }
  if (opts.jitter_ties) detail::jitter_pseudo_observations(u, opts.jitter_seed);
  CEEstimate est;
  est.value_nats = -ksg_mutual_information(u, opts.k);
  est.k = opts.k;
  est.n = u.n();
  return est;
}

inline CEEstimate copula_entropy(const SampleMatrix& data, int k) {
  CeOptions opts;
  opts.k = k;
  return copula_entropy(data, opts);
}

/// Sample Pearson correlation. Errors on n < 2 or constant input.
inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (n < 2) throw std::invalid_argument("pearson: need at least 2 samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw std::invalid_argument("pearson: constant input");
  return sxy / std::sqrt(sxx * syy);
}

/// One row of the characteristic-vs-score dependence output.
struct CeRow {
  std::string feature;
  std::string condition;  // "TUG", "Daily" or "Both"
  CEEstimate estimate;
};

/// Copula entropy between each characteristic and the TUG score, for each
/// requested condition subset. Characteristics with fewer than min_rows
/// complete rows in a subset are skipped with a warning.
inline std::vector<CeRow> dependence_with_score(const FeatureTable& table,
                                                const CeOptions& opts = {},
                                                std::size_t min_rows = 30,
                                                std::vector<std::string>* warnings = nullptr) {
  struct Subset {
    std::optional<Condition> filter;
    const char* label;
  };
  static constexpr Subset subsets[] = {
      {Condition::TUG, "TUG"}, {Condition::Daily, "Daily"}, {std::nullopt, "Both"}};

  std::vector<CeRow> out;
  for (const auto& subset : subsets) {
    for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
      SampleMatrix m;
      m.names = {FeatureVector::names()[f], "tug_score"};
      m.columns.resize(2);
      for (const auto& r : table.rows) {
        if (subset.filter && r.condition != *subset.filter) continue;
        if (const auto v = r.features.get(f)) {
          m.columns[0].push_back(*v);
          m.columns[1].push_back(r.tug_score_s);
        }
      }
      if (m.columns[0].size() < min_rows) {
        if (warnings)
          warnings->push_back("skipping CE for " + m.names[0] + " (" + subset.label + "): only " +
                              std::to_string(m.columns[0].size()) + " complete rows");
        continue;
      }
      CeRow row;
      row.feature = FeatureVector::names()[f];
      row.condition = subset.label;
      row.estimate = copula_entropy(m, opts, warnings);
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace gaitkit
