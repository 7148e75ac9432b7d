#pragma once

// Peak detection by local maxima, topographic prominence and a minimum
// peak-to-peak separation.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace gaitkit {

namespace detail {

/// Strict local maxima; a flat run counts once, at its middle sample. Runs
/// touching either boundary are not peaks.
inline std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> out;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i] > x[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && x[j + 1] == x[i]) ++j;
      if (j + 1 < n && x[j + 1] < x[i]) out.push_back(i + (j - i) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

/// Height above the higher of the two flanking minima, scanning outward until
/// a strictly higher sample or the signal edge.
inline double prominence_at(std::span<const double> x, std::size_t peak) {
  const double h = x[peak];
  double left_min = h;
  for (std::size_t i = peak; i-- > 0;) {
    if (x[i] > h) break;
    left_min = std::min(left_min, x[i]);
  }
  double right_min = h;
  for (std::size_t i = peak + 1; i < x.size(); ++i) {
    if (x[i] > h) break;
    right_min = std::min(right_min, x[i]);
  }
  return h - std::max(left_min, right_min);
}

}  // namespace detail

/// Peaks of `x` with prominence >= min_prominence and pairwise index distance
/// > min_separation. When two candidates fall within the separation, the
/// higher one wins (ties broken toward the lower index). Indices ascend.
inline std::vector<std::size_t> find_peaks(std::span<const double> x, double min_prominence,
                                           std::size_t min_separation) {
  auto candidates = detail::local_maxima(x);
  std::erase_if(candidates,
                [&](std::size_t p) { return detail::prominence_at(x, p) < min_prominence; });

  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] > x[b];
    return a < b;
  });
  std::vector<std::size_t> accepted;
  for (std::size_t p : candidates) {
    const bool blocked = std::any_of(accepted.begin(), accepted.end(), [&](std::size_t q) {
      return (p > q ? p - q : q - p) <= min_separation;
    });
    if (!blocked) accepted.push_back(p);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

}  // namespace gaitkit
