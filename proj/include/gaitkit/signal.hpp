#pragma once

// Derived signals: finite-difference speed and acceleration, resampling,
// smoothing and detrending primitives shared by segmentation and features.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaitkit/core.hpp"

namespace gaitkit {

/// Speed of body movement: Euclidean norm of the central-difference velocity
/// of the three position channels. Endpoints use one-sided differences.
inline std::vector<double> derive_speed(const SampleSeries& s) {
  const std::size_t n = s.size();
  if (n < 2) throw std::invalid_argument("derive_speed: need at least 2 samples");
  std::vector<double> speed(n);
  auto velocity_norm = [&](std::size_t a, std::size_t b) {
    const double dt = s.t[b] - s.t[a];
    const double vx = (s.pos_ap[b] - s.pos_ap[a]) / dt;
    const double vy = (s.pos_ml[b] - s.pos_ml[a]) / dt;
    const double vz = (s.pos_v[b] - s.pos_v[a]) / dt;
    return std::sqrt(vx * vx + vy * vy + vz * vz);
  };
  speed[0] = velocity_norm(0, 1);
  for (std::size_t i = 1; i + 1 < n; ++i) speed[i] = velocity_norm(i - 1, i + 1);
  speed[n - 1] = velocity_norm(n - 2, n - 1);
  return speed;
}

/// Per-axis acceleration by second central difference scaled by rate^2;
/// endpoints reuse the adjacent interior second difference (one-sided).
/// Returns {a_ap, a_ml, a_v}, each of length n.
inline std::array<std::vector<double>, 3> derive_acceleration(const SampleSeries& s) {
  const std::size_t n = s.size();
  if (n < 3) throw std::invalid_argument("derive_acceleration: need at least 3 samples");
  const double r2 = s.sample_rate_hz * s.sample_rate_hz;
  std::array<std::vector<double>, 3> out;
  const std::vector<double>* channels[3] = {&s.pos_ap, &s.pos_ml, &s.pos_v};
  for (int axis = 0; axis < 3; ++axis) {
    const auto& p = *channels[axis];
    auto& a = out[axis];
    a.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) a[i] = (p[i + 1] - 2.0 * p[i] + p[i - 1]) * r2;
    a[0] = (p[2] - 2.0 * p[1] + p[0]) * r2;
    a[n - 1] = (p[n - 1] - 2.0 * p[n - 2] + p[n - 3]) * r2;
  }
  return out;
}

/// Euclidean norm of the three acceleration axes, per sample.
inline std::vector<double> acceleration_magnitude(const SampleSeries& s) {
  const auto a = derive_acceleration(s);
  std::vector<double> mag(s.size());
  for (std::size_t i = 0; i < mag.size(); ++i)
    mag[i] = std::sqrt(a[0][i] * a[0][i] + a[1][i] * a[1][i] + a[2][i] * a[2][i]);
  return mag;
}

/// Linear interpolation onto a uniform grid at target_rate, starting at t[0].
/// The duration is preserved up to one sample period.
inline SampleSeries resample(const SampleSeries& s, double target_rate_hz) {
  if (!(target_rate_hz > 0.0)) throw std::invalid_argument("resample: rate must be positive");
  const std::size_t n = s.size();
  if (n < 2) throw std::invalid_argument("resample: need at least 2 samples");
  const double t0 = s.t.front();
  const double duration = s.t.back() - t0;
  const std::size_t m = static_cast<std::size_t>(std::floor(duration * target_rate_hz)) + 1;
  if (m < 2) throw std::invalid_argument("resample: series shorter than one target period");

  SampleSeries out;
  out.subject_id = s.subject_id;
  out.condition = s.condition;
  out.sample_rate_hz = target_rate_hz;
  out.tug_score_s = s.tug_score_s;
  out.t.resize(m);
  out.pos_ap.resize(m);
  out.pos_ml.resize(m);
  out.pos_v.resize(m);

  std::size_t seg = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double tj = t0 + static_cast<double>(j) / target_rate_hz;
    while (seg + 2 < n && s.t[seg + 1] < tj) ++seg;
    const double span = s.t[seg + 1] - s.t[seg];
    double w = (tj - s.t[seg]) / span;
    w = std::clamp(w, 0.0, 1.0);
    out.t[j] = tj - t0;
    out.pos_ap[j] = s.pos_ap[seg] + w * (s.pos_ap[seg + 1] - s.pos_ap[seg]);
    out.pos_ml[j] = s.pos_ml[seg] + w * (s.pos_ml[seg + 1] - s.pos_ml[seg]);
    out.pos_v[j] = s.pos_v[seg] + w * (s.pos_v[seg + 1] - s.pos_v[seg]);
  }
  return out;
}

/// Centered moving average with a window of `window_samples` (>= 1), shrunk at
/// the edges.
inline std::vector<double> moving_average(std::span<const double> x, std::size_t window_samples) {
  const std::size_t n = x.size();
  if (window_samples < 1) window_samples = 1;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  const std::size_t lo = (window_samples - 1) / 2;
  const std::size_t hi = window_samples / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= lo ? i - lo : 0;
    const std::size_t b = std::min(n - 1, i + hi);
    out[i] = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
  }
  return out;
}

/// Removes the least-squares line over the sample index.
inline std::vector<double> linear_detrend(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(x.begin(), x.end());
  if (n < 2) return out;
  const double nn = static_cast<double>(n);
  const double mean_i = (nn - 1.0) / 2.0;
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / nn;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i) - mean_i;
    sxy += di * (x[i] - mean_x);
    sxx += di * di;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out[i] -= mean_x + slope * (static_cast<double>(i) - mean_i);
  return out;
}

inline double mean_of(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean_of: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation (n-1 denominator); 0 for a single value.
inline double sample_sd(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("sample_sd: empty input");
  if (n == 1) return 0.0;
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace gaitkit
