#pragma once

// Welch-averaged power spectral density and modal-frequency extraction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace gaitkit {

/// One-sided power spectral density. freqs ascend from 0 to the Nyquist bin.
struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> power;

  double total_power() const {
    double s = 0.0;
    for (double p : power) s += p;
    return s;
  }
};

struct SpectrumOptions {
  std::size_t max_segment = 256;     // segment length is min(max_segment, n/2)
  double overlap = 0.5;
  bool hann_window = true;           // false: rectangular (diagnostics)
  std::size_t segment_override = 0;  // nonzero: use exactly this segment length
};

/// Welch periodogram: segments of length min(256, floor(n/2)) with 50%
/// overlap, per-segment mean removal, periodic Hann window. Normalized so that
/// sum(power) * (rate / L) approximates the signal variance (discrete
/// Parseval holds exactly for the rectangular single-segment configuration).
inline Spectrum power_spectrum(std::span<const double> signal, double rate_hz,
                               const SpectrumOptions& opts = {}) {
  const std::size_t n = signal.size();
  if (n < 64) throw std::invalid_argument("power_spectrum: need at least 64 samples");
  if (!(rate_hz > 0.0)) throw std::invalid_argument("power_spectrum: rate must be positive");
  const std::size_t seg_len =
      opts.segment_override > 0 ? std::min(opts.segment_override, n) : std::min(opts.max_segment, n / 2);
  const std::size_t overlap = static_cast<std::size_t>(std::floor(opts.overlap * static_cast<double>(seg_len)));
  const std::size_t step = seg_len > overlap ? seg_len - overlap : 1;
  const std::size_t n_bins = seg_len / 2 + 1;

  std::vector<double> window(seg_len, 1.0);
  if (opts.hann_window)
    for (std::size_t i = 0; i < seg_len; ++i)
      window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(seg_len)));
  double window_ssq = 0.0;
  for (double w : window) window_ssq += w * w;

  // Exact L-th roots of unity by table lookup; no phase drift across a segment.
  std::vector<double> cos_tab(seg_len);
  std::vector<double> sin_tab(seg_len);
  for (std::size_t i = 0; i < seg_len; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg_len);
    cos_tab[i] = std::cos(a);
    sin_tab[i] = std::sin(a);
  }

  Spectrum spec;
  spec.freqs_hz.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k)
    spec.freqs_hz[k] = static_cast<double>(k) * rate_hz / static_cast<double>(seg_len);
  spec.power.assign(n_bins, 0.0);

  std::vector<double> buf(seg_len);
  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + seg_len <= n; start += step) {
    double mean = 0.0;
    for (std::size_t i = 0; i < seg_len; ++i) mean += signal[start + i];
    mean /= static_cast<double>(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i) buf[i] = (signal[start + i] - mean) * window[i];

    for (std::size_t k = 0; k < n_bins; ++k) {
      double re = 0.0;
      double im = 0.0;
      std::size_t idx = 0;
      for (std::size_t i = 0; i < seg_len; ++i) {
        re += buf[i] * cos_tab[idx];
        im -= buf[i] * sin_tab[idx];
        idx += k;
        if (idx >= seg_len) idx -= seg_len;
      }
      spec.power[k] += re * re + im * im;
    }
    ++n_segments;
    if (step == 0) break;
  }
  if (n_segments == 0) throw std::invalid_argument("power_spectrum: signal shorter than one segment");

  const double norm = 1.0 / (rate_hz * window_ssq * static_cast<double>(n_segments));
  for (std::size_t k = 0; k < n_bins; ++k) {
    const bool interior = k > 0 && !(seg_len % 2 == 0 && k == n_bins - 1);
    spec.power[k] *= norm * (interior ? 2.0 : 1.0);
  }
  return spec;
}

/// Frequency of the maximum-power bin within [band_lo, band_hi]. Errors when
/// no bin falls in the band or the in-band power is negligible relative to the
/// whole spectrum (max in-band <= 1e-6 * max overall).
inline double modal_frequency(const Spectrum& spec, double band_lo_hz = 0.3,
                              double band_hi_hz = 5.0) {
  if (spec.freqs_hz.size() != spec.power.size() || spec.freqs_hz.empty())
    throw std::invalid_argument("modal_frequency: malformed spectrum");
  double best_power = -1.0;
  double best_freq = 0.0;
  double max_overall = 0.0;
  bool any_in_band = false;
  for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
    max_overall = std::max(max_overall, spec.power[k]);
    const double f = spec.freqs_hz[k];
    if (f < band_lo_hz || f > band_hi_hz) continue;
    any_in_band = true;
    if (spec.power[k] > best_power) {
      best_power = spec.power[k];
      best_freq = f;
    }
  }
  if (!any_in_band) throw std::runtime_error("modal_frequency: no spectral bin inside band");
  if (best_power <= 1e-6 * max_overall)
    throw std::runtime_error("modal_frequency: spectrum degenerate inside band");
  return best_freq;
}

/// Fraction of total power at frequencies <= threshold.
inline double low_frequency_fraction(const Spectrum& spec, double threshold_hz) {
  double below = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
    total += spec.power[k];
    if (spec.freqs_hz[k] <= threshold_hz) below += spec.power[k];
  }
  if (!(total > 0.0))
    throw std::runtime_error("low_frequency_fraction: spectrum has no power");
  return below / total;
}

}  // namespace gaitkit
