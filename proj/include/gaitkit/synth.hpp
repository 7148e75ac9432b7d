#pragma once

// Seeded generators with analytic ground truth. These are the oracles the
// test suites check the pipeline against: a kinematic walk model whose speed,
// step timing and step length are known by construction, a Gaussian-copula
// sampler with closed-form mutual information, and a two-condition dataset
// writer that plants known effect directions.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/copula.hpp"
#include "gaitkit/core.hpp"
#include "gaitkit/io.hpp"
#include "gaitkit/rng.hpp"

namespace gaitkit {

/// Kinematic walk: AP advances at `speed` with a small step-frequency surge,
/// V oscillates at the step frequency, ML at the stride frequency. Gaussian
/// position noise is added per sample. speed, step_period and step_length
/// must be mutually consistent (speed = step_length / step_period).
struct WalkParams {
  double speed_mps = 0.7;
  double step_period_s = 0.55;
  double step_length_m = 0.385;
  double vertical_amplitude_m = 0.004;
  double ml_amplitude_m = 0.01;
  double noise_sd_m = 0.0;
  double duration_s = 60.0;
  double rate_hz = 30.0;
  std::uint64_t seed = 1;

  // model shape knobs beyond the core gait parameters
  double ap_surge_m = 0.005;        // step-frequency AP modulation amplitude
  double speed_wobble_frac = 0.0;   // slow relative speed modulation
  double speed_wobble_period_s = 6.3;

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("WalkParams: ") + what + " must be > 0");
    };
    positive(speed_mps, "speed");
    positive(step_period_s, "step_period");
    positive(step_length_m, "step_length");
    positive(vertical_amplitude_m, "vertical_amplitude");
    positive(ml_amplitude_m, "ml_amplitude");
    positive(duration_s, "duration");
    positive(rate_hz, "rate");
    if (noise_sd_m < 0.0) throw std::invalid_argument("WalkParams: noise_sd must be >= 0");
    if (std::abs(speed_mps * step_period_s - step_length_m) > 1e-9)
      throw std::invalid_argument("WalkParams: speed, step_period and step_length are inconsistent");
  }
};

/// Consistent parameter set: step_length is derived from speed and period.
inline WalkParams make_walk_params(double speed_mps, double step_period_s) {
  WalkParams p;
  p.speed_mps = speed_mps;
  p.step_period_s = step_period_s;
  p.step_length_m = speed_mps * step_period_s;
  return p;
}

struct WalkTruth {
  double speed_mps = 0.0;
  double step_period_s = 0.0;
  double stride_period_s = 0.0;
  double step_length_m = 0.0;
  double step_freq_hz = 0.0;
  double stride_freq_hz = 0.0;
};

inline std::pair<SampleSeries, WalkTruth> gen_walk(const WalkParams& p,
                                                   const std::string& subject_id = "synthetic",
                                                   Condition condition = Condition::TUG,
                                                   double tug_score_s = 10.0) {
  p.validate();
  if (p.rate_hz < 4.0 / p.step_period_s) throw std::invalid_argument("gen_walk: undersampled");

  const auto n = static_cast<std::size_t>(std::floor(p.duration_s * p.rate_hz)) + 1;
  if (n < 2) throw std::invalid_argument("gen_walk: duration too short");

  SampleSeries s;
  s.subject_id = subject_id;
  s.condition = condition;
  s.sample_rate_hz = p.rate_hz;
  s.tug_score_s = tug_score_s;
  s.t.resize(n);
  s.pos_ap.resize(n);
  s.pos_ml.resize(n);
  s.pos_v.resize(n);

  Rng rng(p.seed);
  const double w_step = 2.0 * std::numbers::pi / p.step_period_s;
  const double w_wob = 2.0 * std::numbers::pi / p.speed_wobble_period_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.rate_hz;
    s.t[i] = t;
    // integral of speed * (1 + wobble * sin(w_wob t)), plus the step surge
    double ap = p.speed_mps * t + p.ap_surge_m * std::sin(w_step * t);
    if (p.speed_wobble_frac != 0.0)
      ap += p.speed_mps * p.speed_wobble_frac / w_wob * (1.0 - std::cos(w_wob * t));
    s.pos_ap[i] = ap + (p.noise_sd_m > 0.0 ? rng.normal(0.0, p.noise_sd_m) : 0.0);
    s.pos_ml[i] = p.ml_amplitude_m * std::sin(0.5 * w_step * t) +
                  (p.noise_sd_m > 0.0 ? rng.normal(0.0, p.noise_sd_m) : 0.0);
    s.pos_v[i] = p.vertical_amplitude_m * std::sin(w_step * t) +
                 (p.noise_sd_m > 0.0 ? rng.normal(0.0, p.noise_sd_m) : 0.0);
  }

  WalkTruth truth;
  truth.speed_mps = p.speed_mps;
  truth.step_period_s = p.step_period_s;
  truth.stride_period_s = 2.0 * p.step_period_s;
  truth.step_length_m = p.step_length_m;
  truth.step_freq_hz = 1.0 / p.step_period_s;
  truth.stride_freq_hz = 0.5 / p.step_period_s;
  return {std::move(s), truth};
}

enum class Marginal { Identity, Exponential, Cubic };

struct CopulaParams {
  std::size_t n = 1000;
  double rho = 0.0;
  Marginal marginal_x = Marginal::Identity;
  Marginal marginal_y = Marginal::Identity;
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 10) throw std::invalid_argument("CopulaParams: n must be >= 10");
    if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("CopulaParams: |rho| must be < 1");
  }
};

struct CopulaSample {
  SampleMatrix data;
  double known_mi_nats = 0.0;  // -0.5 ln(1 - rho^2); CE of the pair is its negative
};

inline double apply_marginal(Marginal m, double v) {
  switch (m) {
    case Marginal::Identity: return v;
    case Marginal::Exponential: return std::exp(v);
    case Marginal::Cubic: return v * v * v;
  }
  throw std::logic_error("apply_marginal: unknown marginal");
}

/// Bivariate Gaussian with correlation rho, each column then pushed through a
/// strictly increasing marginal transform (which leaves the true MI unchanged).
inline CopulaSample gen_gaussian_copula(const CopulaParams& p) {
  p.validate();
  Rng rng(p.seed);
  CopulaSample out;
  out.data.names = {"x", "y"};
  out.data.columns.assign(2, std::vector<double>(p.n));
  const double mix = std::sqrt(1.0 - p.rho * p.rho);
  for (std::size_t i = 0; i < p.n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    out.data.columns[0][i] = apply_marginal(p.marginal_x, z1);
    out.data.columns[1][i] = apply_marginal(p.marginal_y, p.rho * z1 + mix * z2);
  }
  out.known_mi_nats = -0.5 * std::log1p(-p.rho * p.rho);
  return out;
}

/// Multipliers applied to the walk parameters for the Daily condition.
struct WalkScales {
  double speed = 1.0;
  double step_period = 1.0;
  double vertical_amplitude = 1.0;
  double ml_amplitude = 1.0;
  double noise_sd = 1.0;
};

struct DatasetParams {
  WalkParams base;                     // TUG-condition template
  WalkScales daily;
  int subjects = 20;
  std::uint64_t seed = 1;
  double subject_speed_jitter = 0.10;  // relative, uniform
  double subject_period_jitter = 0.05;
  double patient_slowdown = 0.8;       // extra speed factor for patients
  int patient_every = 4;               // every n-th subject is a patient
  // TUG score = intercept - slope * subject speed + N(0, noise)
  double tug_intercept_s = 22.0;
  double tug_speed_slope = 14.0;
  double tug_noise_sd_s = 0.3;
};

struct SubjectTruth {
  std::string subject_id;
  Group group = Group::Control;
  double tug_score_s = 0.0;
  WalkTruth tug;
  WalkTruth daily;
};

struct GeneratedDataset {
  std::filesystem::path manifest_path;
  std::vector<SubjectTruth> subjects;
};

/// Writes one TUG and one Daily recording per subject plus the manifest, in
/// the exact formats the parsers read. Subject parameters are jittered from
/// the base, Daily parameters are the subject's scaled by `daily`, and the
/// TUG score is a decreasing function of subject speed, so the dependence of
/// speed-like characteristics on the score is planted by construction. Fully
/// determined by `seed`.
inline GeneratedDataset gen_two_condition_dataset(const DatasetParams& dp,
                                                  const std::filesystem::path& out_dir) {
  if (dp.subjects < 2) throw std::invalid_argument("gen_two_condition_dataset: need >= 2 subjects");
  std::filesystem::create_directories(out_dir);

  GeneratedDataset result;
  std::vector<ManifestRow> manifest_rows;
  for (int i = 0; i < dp.subjects; ++i) {
    Rng rng(mix_seed(dp.seed, static_cast<std::uint64_t>(i)));
    char id[16];
    std::snprintf(id, sizeof(id), "S%03d", i + 1);

    const bool patient = dp.patient_every > 0 && (i % dp.patient_every) == dp.patient_every - 1;
    const double speed_mult = (1.0 + dp.subject_speed_jitter * (2.0 * rng.uniform() - 1.0)) *
                              (patient ? dp.patient_slowdown : 1.0);
    const double period_mult = 1.0 + dp.subject_period_jitter * (2.0 * rng.uniform() - 1.0);

    WalkParams tug = dp.base;
    tug.speed_mps = dp.base.speed_mps * speed_mult;
    tug.step_period_s = dp.base.step_period_s * period_mult;
    tug.step_length_m = tug.speed_mps * tug.step_period_s;
    tug.seed = rng.next_u64();

    WalkParams daily = tug;
    daily.speed_mps = tug.speed_mps * dp.daily.speed;
    daily.step_period_s = tug.step_period_s * dp.daily.step_period;
    daily.step_length_m = daily.speed_mps * daily.step_period_s;
    daily.vertical_amplitude_m = tug.vertical_amplitude_m * dp.daily.vertical_amplitude;
    daily.ml_amplitude_m = tug.ml_amplitude_m * dp.daily.ml_amplitude;
    daily.noise_sd_m = tug.noise_sd_m * dp.daily.noise_sd;
    daily.seed = rng.next_u64();

    double score = dp.tug_intercept_s - dp.tug_speed_slope * tug.speed_mps +
                   rng.normal(0.0, dp.tug_noise_sd_s);
    score = std::max(score, 1.0);

    SubjectTruth truth;
    truth.subject_id = id;
    truth.group = patient ? Group::Patient : Group::Control;
    truth.tug_score_s = score;

    for (const auto cond : {Condition::TUG, Condition::Daily}) {
      const auto& params = cond == Condition::TUG ? tug : daily;
      auto [series, walk_truth] = gen_walk(params, id, cond, score);
      (cond == Condition::TUG ? truth.tug : truth.daily) = walk_truth;
      const std::string file = std::string(id) + (cond == Condition::TUG ? "_tug.csv" : "_daily.csv");
      write_recording(series, out_dir / file);
      ManifestRow row;
      row.meta.subject_id = id;
      row.meta.group = truth.group;
      row.meta.site = "synthetic";
      row.condition = cond;
      row.tug_score_s = score;
      row.sample_rate_hz = params.rate_hz;
      row.relative_path = file;
      manifest_rows.push_back(std::move(row));
    }
    result.subjects.push_back(std::move(truth));
  }
  result.manifest_path = out_dir / "manifest.csv";
  write_manifest(manifest_rows, result.manifest_path);
  return result;
}

}  // namespace gaitkit
