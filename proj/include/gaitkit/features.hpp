#pragma once

// The nine per-bout gait characteristics, with stride-event detection and the
// spectral quantities they rest on.
//
// Missing values are data here, not failures: a characteristic that cannot be
// computed for a bout (too few strides, degenerate spectrum) stays unset and
// downstream analyses drop the bout for that characteristic only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/core.hpp"
#include "gaitkit/peaks.hpp"
#include "gaitkit/segmentation.hpp"
#include "gaitkit/signal.hpp"
#include "gaitkit/spectrum.hpp"

namespace gaitkit {

/// Vertical-position peaks within a bout and the stride quantities derived
/// from them. A stride spans a peak to the second-next peak.
struct StrideEvents {
  std::vector<std::size_t> peak_indices;       // ascending, within the bout slice
  std::vector<double> stride_intervals_s;      // t[peak i+2] - t[peak i]
  std::vector<double> stride_speeds_mps;       // mean speed over each stride span
};

struct FeatureOptions {
  double prominence_frac = 0.3;   // of the detrended vertical signal's SD
  double min_step_time_s = 0.3;
  double low_freq_threshold_hz = 0.7;
  double modal_band_lo_hz = 0.3;
  double modal_band_hi_hz = 5.0;
  double trim_fraction = 0.10;    // per tail, for speed variability
};

/// The nine characteristics of one bout. Unset fields were not computable.
struct FeatureVector {
  std::optional<double> speed;                // m/s
  std::optional<double> pace;                 // m
  std::optional<double> speed_var;            // m/s
  std::optional<double> stride_time;          // s
  std::optional<double> stride_time_var;      // s
  std::optional<double> stride_freq;          // Hz
  std::optional<double> movement_intensity;   // m/s^2
  std::optional<double> low_freq_pct;         // fraction in [0,1]
  std::optional<double> accel_range;          // m/s^2

  static constexpr std::size_t kCount = 9;

  /// Column order of the feature CSV.
  static const std::array<std::string, kCount>& names() {
    static const std::array<std::string, kCount> n = {
        "speed",       "pace",        "speed_var",
        "stride_time", "stride_time_var", "stride_freq",
        "movement_intensity", "low_freq_pct", "accel_range"};
    return n;
  }

  std::optional<double> get(std::size_t i) const {
    switch (i) {
      case 0: return speed;
      case 1: return pace;
      case 2: return speed_var;
      case 3: return stride_time;
      case 4: return stride_time_var;
      case 5: return stride_freq;
      case 6: return movement_intensity;
      case 7: return low_freq_pct;
      case 8: return accel_range;
      default: throw std::out_of_range("FeatureVector::get");
    }
  }

  void set(std::size_t i, std::optional<double> v) {
    switch (i) {
      case 0: speed = v; break;
      case 1: pace = v; break;
      case 2: speed_var = v; break;
      case 3: stride_time = v; break;
      case 4: stride_time_var = v; break;
      case 5: stride_freq = v; break;
      case 6: movement_intensity = v; break;
      case 7: low_freq_pct = v; break;
      case 8: accel_range = v; break;
      default: throw std::out_of_range("FeatureVector::set");
    }
  }

  bool complete() const {
    for (std::size_t i = 0; i < kCount; ++i)
      if (!get(i)) return false;
    return true;
  }
};

/// Peaks of the linearly detrended vertical position, prominence at least
/// prominence_frac times the detrended signal's SD, separated by more than
/// min_step_time. Throws "insufficient strides" when fewer than 3 peaks
/// survive.
inline StrideEvents detect_stride_events(const Bout& bout, const FeatureOptions& opts = {}) {
  const SampleSeries slice = bout_slice(bout);
  const auto detrended = linear_detrend(slice.pos_v);
  const double sd = sample_sd(detrended);
  const auto min_sep =
      static_cast<std::size_t>(std::llround(opts.min_step_time_s * slice.sample_rate_hz));
  const auto peaks = find_peaks(detrended, opts.prominence_frac * sd, min_sep);
  if (peaks.size() < 3) throw std::runtime_error("insufficient strides");

  StrideEvents ev;
  ev.peak_indices = peaks;
  const auto speed = derive_speed(slice);
  for (std::size_t i = 0; i + 2 < peaks.size(); ++i) {
    const std::size_t a = peaks[i];
    const std::size_t b = peaks[i + 2];
    ev.stride_intervals_s.push_back(slice.t[b] - slice.t[a]);
    double sum = 0.0;
    for (std::size_t k = a; k <= b; ++k) sum += speed[k];
    ev.stride_speeds_mps.push_back(sum / static_cast<double>(b - a + 1));
  }
  return ev;
}

/// Mean of the speed signal over the bout.
inline double feature_gait_speed(const Bout& bout) {
  const SampleSeries slice = bout_slice(bout);
  return mean_of(derive_speed(slice));
}

/// Mean AP-ML plane displacement between consecutive vertical peaks (one step
/// per peak-to-peak interval). Unset with fewer than 2 peaks.
inline std::optional<double> feature_pace(const Bout& bout, const StrideEvents& events) {
  if (events.peak_indices.size() < 2) return std::nullopt;
  const SampleSeries slice = bout_slice(bout);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < events.peak_indices.size(); ++i) {
    const std::size_t a = events.peak_indices[i];
    const std::size_t b = events.peak_indices[i + 1];
    const double dap = slice.pos_ap[b] - slice.pos_ap[a];
    const double dml = slice.pos_ml[b] - slice.pos_ml[a];
    sum += std::sqrt(dap * dap + dml * dml);
  }
  return sum / static_cast<double>(events.peak_indices.size() - 1);
}

/// SD of the stride speeds after discarding the highest and lowest 10%
/// (ceil, per tail). Unset with fewer than 5 stride speeds.
inline std::optional<double> feature_speed_variability(const StrideEvents& events,
                                                       double trim_fraction = 0.10) {
  const std::size_t n = events.stride_speeds_mps.size();
  if (n < 5) return std::nullopt;
  std::vector<double> v = events.stride_speeds_mps;
  std::sort(v.begin(), v.end());
  const auto cut = static_cast<std::size_t>(std::ceil(trim_fraction * static_cast<double>(n)));
  if (n < 2 * cut + 2) return std::nullopt;
  return sample_sd(std::span<const double>(v.data() + cut, n - 2 * cut));
}

/// Mean stride interval; unset without at least 3 peaks.
inline std::optional<double> feature_stride_time(const StrideEvents& events) {
  if (events.stride_intervals_s.empty()) return std::nullopt;
  return mean_of(events.stride_intervals_s);
}

/// SD of the stride intervals; unset without at least 5 peaks (3 intervals).
inline std::optional<double> feature_stride_time_variability(const StrideEvents& events) {
  if (events.stride_intervals_s.size() < 3) return std::nullopt;
  return sample_sd(events.stride_intervals_s);
}

/// Median of { modal(ML), modal(V)/2, modal(AP)/2 } over the position spectra.
/// Each axis is linearly detrended before the spectral estimate so the walking
/// drift does not mask the gait line. Unset when any axis spectrum fails.
inline std::optional<double> feature_stride_frequency(const Bout& bout,
                                                      const FeatureOptions& opts = {}) {
  const SampleSeries slice = bout_slice(bout);
  auto modal_of = [&](const std::vector<double>& p) {
    const auto spec = power_spectrum(linear_detrend(p), slice.sample_rate_hz);
    return modal_frequency(spec, opts.modal_band_lo_hz, opts.modal_band_hi_hz);
  };
  try {
    std::array<double, 3> m = {modal_of(slice.pos_ml), modal_of(slice.pos_v) / 2.0,
                               modal_of(slice.pos_ap) / 2.0};
    std::sort(m.begin(), m.end());
    return m[1];
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// SD of the acceleration magnitude over the bout.
inline double feature_movement_intensity(const Bout& bout) {
  const SampleSeries slice = bout_slice(bout);
  return sample_sd(acceleration_magnitude(slice));
}

/// Fraction of the acceleration-magnitude spectral power at or below the
/// threshold frequency. Unset when the magnitude signal carries no power.
inline std::optional<double> feature_low_freq_percentage(const Bout& bout,
                                                         double threshold_hz = 0.7) {
  const SampleSeries slice = bout_slice(bout);
  try {
    const auto spec = power_spectrum(acceleration_magnitude(slice), slice.sample_rate_hz);
    return low_frequency_fraction(spec, threshold_hz);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// Max minus min of the acceleration magnitude over the bout.
inline double feature_acceleration_range(const Bout& bout) {
  const SampleSeries slice = bout_slice(bout);
  const auto mag = acceleration_magnitude(slice);
  const auto [lo, hi] = std::minmax_element(mag.begin(), mag.end());
  return *hi - *lo;
}

/// Assembles all nine characteristics. Stride-based fields are unset when the
/// bout has too few detectable strides.
inline FeatureVector extract_feature_vector(const Bout& bout, const FeatureOptions& opts = {}) {
  FeatureVector f;
  f.speed = feature_gait_speed(bout);
  f.movement_intensity = feature_movement_intensity(bout);
  f.accel_range = feature_acceleration_range(bout);
  f.low_freq_pct = feature_low_freq_percentage(bout, opts.low_freq_threshold_hz);
  f.stride_freq = feature_stride_frequency(bout, opts);
  try {
    const StrideEvents ev = detect_stride_events(bout, opts);
    f.pace = feature_pace(bout, ev);
    f.speed_var = feature_speed_variability(ev, opts.trim_fraction);
    f.stride_time = feature_stride_time(ev);
    f.stride_time_var = feature_stride_time_variability(ev);
  } catch (const std::exception&) {
    // fewer than 3 peaks: stride-based features stay unset
  }
  return f;
}

}  // namespace gaitkit
