#pragma once

// Walking-interval detection and fixed-length/fixed-step bout slicing.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/core.hpp"
#include "gaitkit/signal.hpp"

namespace gaitkit {

/// Maximal run of samples whose smoothed speed stays above the detection
/// threshold. Indices are inclusive.
struct WalkInterval {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  double mean_speed_mps = 0.0;
};

/// A fixed-length window of continuous walking, the unit of feature
/// extraction. Holds a non-owning reference to its source series, which must
/// outlive the bout.
struct Bout {
  const SampleSeries* source = nullptr;
  std::size_t start_index = 0;
  std::size_t n_samples = 0;
  double start_time_s = 0.0;
  double length_s = 0.0;
  std::string subject_id;
  Condition condition = Condition::TUG;
  double tug_score_s = 0.0;
};

struct SegmentationOptions {
  double speed_threshold_mps = 0.1;
  double min_duration_s = 15.0;       // default: one bout length
  double smoothing_window_s = 0.5;    // moving average applied before thresholding
  double bout_length_s = 15.0;
  double bout_step_s = 3.0;
};

/// Maximal runs where the moving-average speed exceeds `speed_threshold` and
/// the run lasts at least `min_duration`. Intervals come out disjoint and
/// ordered; an empty result is valid.
inline std::vector<WalkInterval> detect_walking(const SampleSeries& series,
                                                double speed_threshold_mps,
                                                double min_duration_s,
                                                double smoothing_window_s = 0.5) {
  if (speed_threshold_mps < 0.0)
    throw std::invalid_argument("detect_walking: threshold must be >= 0");
  const auto speed = derive_speed(series);
  const auto window =
      static_cast<std::size_t>(std::llround(smoothing_window_s * series.sample_rate_hz));
  const auto smoothed = moving_average(speed, window == 0 ? 1 : window);

  std::vector<WalkInterval> out;
  const std::size_t n = smoothed.size();
  std::size_t i = 0;
  while (i < n) {
    if (!(smoothed[i] > speed_threshold_mps)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && smoothed[j + 1] > speed_threshold_mps) ++j;
    if (series.t[j] - series.t[i] >= min_duration_s) {
      WalkInterval w;
      w.start_index = i;
      w.end_index = j;
      double sum = 0.0;
      for (std::size_t k = i; k <= j; ++k) sum += smoothed[k];
      w.mean_speed_mps = sum / static_cast<double>(j - i + 1);
      out.push_back(w);
    }
    i = j + 1;
  }
  return out;
}

/// Slices each interval into bouts of `bout_length` starting every `bout_step`
/// from the interval start. An interval of duration D yields
/// floor((D - L) / S) + 1 bouts (0 when D < L). Bouts never span interval
/// boundaries and carry the series' subject, condition and TUG score.
inline std::vector<Bout> generate_bouts(const SampleSeries& series,
                                        const std::vector<WalkInterval>& intervals,
                                        double bout_length_s = 15.0, double bout_step_s = 3.0) {
  if (!(bout_length_s > 0.0)) throw std::invalid_argument("generate_bouts: bout length must be > 0");
  if (!(bout_step_s > 0.0)) throw std::invalid_argument("generate_bouts: bout step must be > 0");
  const double rate = series.sample_rate_hz;
  const auto len_samples = static_cast<std::size_t>(std::llround(bout_length_s * rate));
  auto step_samples = static_cast<std::size_t>(std::llround(bout_step_s * rate));
  if (step_samples == 0) step_samples = 1;

  std::vector<Bout> out;
  for (const auto& w : intervals) {
    if (w.end_index < w.start_index + len_samples) continue;
    for (std::size_t i0 = w.start_index; i0 + len_samples <= w.end_index; i0 += step_samples) {
      Bout b;
      b.source = &series;
      b.start_index = i0;
      b.n_samples = len_samples + 1;
      b.start_time_s = series.t[i0];
      b.length_s = series.t[i0 + len_samples] - series.t[i0];
      b.subject_id = series.subject_id;
      b.condition = series.condition;
      b.tug_score_s = series.tug_score_s;
      out.push_back(std::move(b));
    }
  }
  return out;
}

/// Copies a bout's sample window into a standalone series (timestamps re-based
/// to 0). Features are computed on this isolated slice.
inline SampleSeries bout_slice(const Bout& b) {
  const auto& src = *b.source;
  SampleSeries s;
  s.subject_id = b.subject_id;
  s.condition = b.condition;
  s.sample_rate_hz = src.sample_rate_hz;
  s.tug_score_s = b.tug_score_s;
  const std::size_t a = b.start_index;
  const std::size_t e = b.start_index + b.n_samples;
  s.t.assign(src.t.begin() + a, src.t.begin() + e);
  const double t0 = s.t.front();
  for (double& t : s.t) t -= t0;
  s.pos_ap.assign(src.pos_ap.begin() + a, src.pos_ap.begin() + e);
  s.pos_ml.assign(src.pos_ml.begin() + a, src.pos_ml.begin() + e);
  s.pos_v.assign(src.pos_v.begin() + a, src.pos_v.begin() + e);
  return s;
}

}  // namespace gaitkit
