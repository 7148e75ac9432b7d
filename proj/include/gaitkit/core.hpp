#pragma once

// Core domain types: recordings, subject metadata, recording conditions.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitkit {

/// Recording condition: controlled TUG test or free-living daily activity.
enum class Condition { TUG, Daily };

enum class Group { Patient, Control };

inline std::string to_string(Condition c) {
  return c == Condition::TUG ? "TUG" : "Daily";
}

inline std::string to_string(Group g) {
  return g == Group::Patient ? "patient" : "control";
}

struct SubjectMeta {
  std::string subject_id;
  Group group = Group::Control;
  std::string site;
};

/// One recording: a body-center trajectory sampled at a fixed rate, with the
/// subject's TUG score attached.
///
/// Channels are anteroposterior / mediolateral / vertical positions in meters;
/// `t` is in seconds, re-based to start at 0. All operations treat a validated
/// series as immutable.
struct SampleSeries {
  std::string subject_id;
  Condition condition = Condition::TUG;
  double sample_rate_hz = 0.0;
  std::vector<double> t;
  std::vector<double> pos_ap;
  std::vector<double> pos_ml;
  std::vector<double> pos_v;
  double tug_score_s = 0.0;

  std::size_t size() const { return t.size(); }
  double duration_s() const { return t.empty() ? 0.0 : t.back() - t.front(); }

  /// Throws std::invalid_argument unless all invariants hold:
  /// strictly increasing near-uniform timestamps (gap deviation <= 10% of the
  /// nominal period), equal channel lengths, n >= 2, positive rate and score.
  void validate() const {
    const std::size_t n = t.size();
    if (n < 2) throw std::invalid_argument("series: need at least 2 samples");
    if (pos_ap.size() != n || pos_ml.size() != n || pos_v.size() != n)
      throw std::invalid_argument("series: channel length mismatch");
    if (!(sample_rate_hz > 0.0))
      throw std::invalid_argument("series: sample rate must be positive");
    if (!(tug_score_s > 0.0))
      throw std::invalid_argument("series: TUG score must be positive");
    const double period = 1.0 / sample_rate_hz;
    for (std::size_t i = 1; i < n; ++i) {
      const double gap = t[i] - t[i - 1];
      if (!(gap > 0.0))
        throw std::invalid_argument("series: timestamps not strictly increasing at sample " +
                                    std::to_string(i));
      if (std::abs(gap - period) > 0.10 * period)
        throw std::invalid_argument("series: sampling gap at sample " + std::to_string(i) +
                                    " deviates more than 10% from 1/rate");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(t[i]) || !std::isfinite(pos_ap[i]) || !std::isfinite(pos_ml[i]) ||
          !std::isfinite(pos_v[i]))
        throw std::invalid_argument("series: non-finite value at sample " + std::to_string(i));
    }
  }
};

}  // namespace gaitkit
