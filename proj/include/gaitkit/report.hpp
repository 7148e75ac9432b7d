#pragma once

// Pipeline orchestration and report-shaped outputs: the per-characteristic
// comparison table, the characteristic-vs-score copula entropies, per-group
// correlation matrices, TUG-score histograms, and a plain-text run log.
// Everything written here is a deterministic function of the inputs and the
// configuration.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/copula.hpp"
#include "gaitkit/core.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/features.hpp"
#include "gaitkit/hypotest.hpp"
#include "gaitkit/io.hpp"
#include "gaitkit/segmentation.hpp"
#include "gaitkit/table.hpp"

namespace gaitkit {

struct AnalysisConfig {
  std::filesystem::path manifest_path;
  double bout_length_s = 15.0;
  double bout_step_s = 3.0;
  double speed_threshold_mps = 0.1;
  double low_freq_threshold_hz = 0.7;
  int ksg_k = 3;
  double histogram_bin_width_s = 2.0;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;  // tie-jitter seed

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0))
        throw std::invalid_argument(std::string("config: ") + what + " must be > 0");
    };
    positive(bout_length_s, "bout_length");
    positive(bout_step_s, "bout_step");
    if (speed_threshold_mps < 0.0) throw std::invalid_argument("config: speed_threshold must be >= 0");
    positive(low_freq_threshold_hz, "low_freq_threshold");
    positive(histogram_bin_width_s, "histogram_bin_width");
    if (ksg_k < 1) throw std::invalid_argument("config: k must be >= 1");
  }

  FeatureOptions feature_options() const {
    FeatureOptions o;
    o.low_freq_threshold_hz = low_freq_threshold_hz;
    return o;
  }

  SegmentationOptions segmentation_options() const {
    SegmentationOptions o;
    o.speed_threshold_mps = speed_threshold_mps;
    o.min_duration_s = bout_length_s;
    o.bout_length_s = bout_length_s;
    o.bout_step_s = bout_step_s;
    return o;
  }
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

/// Left-closed bins of width `bin_width` aligned at 0; only occupied bins are
/// returned and the counts sum to the sample size.
inline std::vector<HistogramBin> histogram_data(std::span<const double> scores, double bin_width) {
  if (scores.empty()) throw std::invalid_argument("histogram_data: empty scores");
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram_data: bin width must be > 0");
  std::map<long long, std::size_t> counts;
  for (double s : scores) counts[static_cast<long long>(std::floor(s / bin_width))]++;
  std::vector<HistogramBin> out;
  for (const auto& [k, c] : counts)
    out.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, c});
  return out;
}

/// 9x9 correlation matrix of one (condition, population) group. Cells use
/// pairwise-complete rows; a cell whose pair is degenerate stays unset.
struct CorrelationMatrix {
  std::string condition;   // "TUG", "Daily" or "Both"
  std::string population;  // "patients", "controls" or "all"
  std::size_t n_rows = 0;
  std::array<std::array<std::optional<double>, FeatureVector::kCount>, FeatureVector::kCount> cells;
};

/// Pearson correlation matrices for each condition subset crossed with
/// {patients, controls, all}. Groups with fewer than 3 rows are omitted with
/// a warning. Matrices are symmetric with unit diagonal.
inline std::vector<CorrelationMatrix> correlation_matrices(const FeatureTable& table,
                                                           std::vector<std::string>* warnings = nullptr) {
  struct GroupSpec {
    std::optional<Condition> condition;
    std::optional<Group> group;
    const char* cond_label;
    const char* pop_label;
  };
  std::vector<GroupSpec> groups;
  const std::pair<std::optional<Condition>, const char*> conds[] = {
      {Condition::TUG, "TUG"}, {Condition::Daily, "Daily"}, {std::nullopt, "Both"}};
  const std::pair<std::optional<Group>, const char*> pops[] = {
      {Group::Patient, "patients"}, {Group::Control, "controls"}, {std::nullopt, "all"}};
  for (const auto& [c, cl] : conds)
    for (const auto& [g, gl] : pops) groups.push_back({c, g, cl, gl});

  std::vector<CorrelationMatrix> out;
  for (const auto& spec : groups) {
    std::vector<const FeatureRow*> rows;
    for (const auto& r : table.rows) {
      if (spec.condition && r.condition != *spec.condition) continue;
      if (spec.group && r.group != *spec.group) continue;
      rows.push_back(&r);
    }
    if (rows.size() < 3) {
      if (warnings)
        warnings->push_back(std::string("correlation matrix ") + spec.cond_label + "/" +
                            spec.pop_label + " omitted: only " + std::to_string(rows.size()) +
                            " rows");
      continue;
    }
    CorrelationMatrix m;
    m.condition = spec.cond_label;
    m.population = spec.pop_label;
    m.n_rows = rows.size();
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
      m.cells[i][i] = 1.0;
      for (std::size_t j = i + 1; j < FeatureVector::kCount; ++j) {
        std::vector<double> xi;
        std::vector<double> xj;
        for (const auto* r : rows) {
          const auto a = r->features.get(i);
          const auto b = r->features.get(j);
          if (a && b) {
            xi.push_back(*a);
            xj.push_back(*b);
          }
        }
        std::optional<double> rho;
        if (xi.size() >= 3) {
          try {
            rho = pearson_correlation(xi, xj);
          } catch (const std::exception&) {
            // constant column in this group; leave unset
          }
        }
        m.cells[i][j] = rho;
        m.cells[j][i] = rho;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

inline std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string fmt_p_value(double p) {
  if (p == 0.0) return "0";
  if (p >= 1e-3) return fmt_fixed(p, 3);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", p);
  return buf;
}

inline std::string fmt_statistic(double v) {
  if (v == std::floor(v)) return fmt_fixed(v, 0);
  return fmt_fixed(v, 1);
}

}  // namespace detail

/// Fixed-layout text rendering of the comparison rows: '&'-separated columns,
/// "mean±var" with two decimals, three-decimal K-S statistics, p-values in
/// fixed or two-digit scientific notation ("0" for exact zero). Absent fields
/// render empty.
inline std::string render_table4(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "Characteristics&Mean and Var TUG&Mean and Var Daily"
         "&K-S Statistic&K-S P-value&M-W Statistic&M-W P-value\n";
  for (const auto& r : rows) {
    auto mean_var = [](const std::optional<SummaryStats>& s) {
      if (!s) return std::string();
      return detail::fmt_fixed(s->mean, 2) + "±" + detail::fmt_fixed(s->variance, 2);
    };
    out << r.display_name << '&' << mean_var(r.tug) << '&' << mean_var(r.daily) << '&'
        << (r.ks ? detail::fmt_fixed(r.ks->statistic, 3) : std::string()) << '&'
        << (r.ks && r.ks->p_value ? detail::fmt_p_value(*r.ks->p_value) : std::string()) << '&'
        << (r.mw ? detail::fmt_statistic(r.mw->statistic) : std::string()) << '&'
        << (r.mw && r.mw->p_value ? detail::fmt_p_value(*r.mw->p_value) : std::string()) << '\n';
  }
  return out.str();
}

/// Machine-readable comparison rows:
/// feature,mean_tug,var_tug,mean_daily,var_daily,ks_stat,ks_p,ks_ties,mw_stat,mw_p
inline std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "feature,mean_tug,var_tug,mean_daily,var_daily,ks_stat,ks_p,ks_ties,mw_stat,mw_p\n";
  for (const auto& r : rows) {
    out << FeatureVector::names()[r.feature_index] << ',';
    if (r.tug) out << csv::format_double(r.tug->mean) << ',' << csv::format_double(r.tug->variance);
    else out << ',';
    out << ',';
    if (r.daily)
      out << csv::format_double(r.daily->mean) << ',' << csv::format_double(r.daily->variance);
    else out << ',';
    out << ',';
    if (r.ks)
      out << csv::format_double(r.ks->statistic) << ','
          << (r.ks->p_value ? csv::format_double(*r.ks->p_value) : std::string()) << ','
          << (r.ks->ties_present ? '1' : '0');
    else out << ",,";
    out << ',';
    if (r.mw)
      out << csv::format_double(r.mw->statistic) << ','
          << (r.mw->p_value ? csv::format_double(*r.mw->p_value) : std::string());
    else out << ',';
    out << '\n';
  }
  return out.str();
}

/// CE rows: feature,condition,ce_nats,k,n
inline std::string ce_rows_to_csv(const std::vector<CeRow>& rows) {
  std::ostringstream out;
  out << "feature,condition,ce_nats,k,n\n";
  for (const auto& r : rows)
    out << r.feature << ',' << r.condition << ',' << csv::format_double(r.estimate.value_nats)
        << ',' << r.estimate.k << ',' << r.estimate.n << '\n';
  return out.str();
}

inline std::string correlation_matrix_to_csv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "feature";
  for (const auto& n : FeatureVector::names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
    out << FeatureVector::names()[i];
    for (std::size_t j = 0; j < FeatureVector::kCount; ++j) {
      out << ',';
      if (m.cells[i][j]) out << csv::format_double(*m.cells[i][j]);
    }
    out << '\n';
  }
  return out.str();
}

struct ReportBundle {
  std::filesystem::path features_csv;
  std::filesystem::path comparison_csv;  // empty when comparison was skipped
  std::filesystem::path table4_txt;
  std::filesystem::path ce_csv;
  std::filesystem::path histogram_csv;
  std::filesystem::path run_log;
  std::vector<std::filesystem::path> correlation_csvs;
  bool comparison_done = false;
  std::size_t n_bouts = 0;
  std::vector<std::string> warnings;
};

namespace detail {

/// Removes everything created so far when a stage fails.
struct OutputGuard {
  std::vector<std::filesystem::path> created;
  bool armed = true;

  void add(const std::filesystem::path& p) { created.push_back(p); }
  ~OutputGuard() {
    if (!armed) return;
    for (const auto& p : created) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

}  // namespace detail

/// Extracts the per-bout feature table from loaded recordings.
inline FeatureTable extract_feature_table(const std::vector<SampleSeries>& recordings,
                                          const std::map<std::string, Group>& groups,
                                          const AnalysisConfig& config,
                                          std::vector<std::string>* warnings = nullptr,
                                          std::size_t* n_intervals = nullptr) {
  const auto seg = config.segmentation_options();
  const auto fopts = config.feature_options();
  FeatureTable table;
  std::size_t intervals_total = 0;
  for (const auto& series : recordings) {
    const auto intervals = detect_walking(series, seg.speed_threshold_mps, seg.min_duration_s,
                                          seg.smoothing_window_s);
    intervals_total += intervals.size();
    const auto bouts = generate_bouts(series, intervals, seg.bout_length_s, seg.bout_step_s);
    if (bouts.empty() && warnings)
      warnings->push_back("no bouts in recording " + series.subject_id + "/" +
                          to_string(series.condition));
    for (const auto& b : bouts) {
      FeatureRow row;
      row.subject_id = b.subject_id;
      row.condition = b.condition;
      const auto it = groups.find(b.subject_id);
      row.group = it != groups.end() ? it->second : Group::Control;
      row.tug_score_s = b.tug_score_s;
      row.bout_start_s = b.start_time_s;
      row.features = extract_feature_vector(b, fopts);
      table.rows.push_back(std::move(row));
    }
  }
  if (n_intervals) *n_intervals = intervals_total;
  return table;
}

/// Runs ingest -> segment -> extract -> compare -> CE -> correlations ->
/// histograms and writes the bundle into config.out_dir. Any stage failure
/// aborts with a stage-tagged error and removes partial outputs. With only
/// one condition present the comparison table is skipped with a warning and
/// `comparison_done` stays false.
inline ReportBundle run_pipeline(const AnalysisConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  ReportBundle bundle;
  detail::OutputGuard guard;
  std::ostringstream log;

  // ingest
  auto descriptors = detail::stage("ingest", [&] { return parse_manifest(config.manifest_path); });
  std::vector<SampleSeries> recordings;
  std::map<std::string, Group> groups;
  detail::stage("ingest", [&] {
    for (const auto& d : descriptors) {
      recordings.push_back(load_recording(d));
      groups[d.meta.subject_id] = d.meta.group;
    }
    return 0;
  });
  std::size_t n_tug_rec = 0;
  for (const auto& r : recordings)
    if (r.condition == Condition::TUG) ++n_tug_rec;
  log << "ingest: " << recordings.size() << " recordings (" << n_tug_rec << " TUG, "
      << recordings.size() - n_tug_rec << " Daily), " << groups.size() << " subjects\n";

  // segment + extract
  std::size_t n_intervals = 0;
  const FeatureTable table = detail::stage("extract", [&] {
    return extract_feature_table(recordings, groups, config, &bundle.warnings, &n_intervals);
  });
  bundle.n_bouts = table.rows.size();
  std::size_t tug_bouts = 0;
  for (const auto& r : table.rows)
    if (r.condition == Condition::TUG) ++tug_bouts;
  log << "segment: " << n_intervals << " walking intervals\n";
  log << "extract: " << table.rows.size() << " bouts (" << tug_bouts << " TUG, "
      << table.rows.size() - tug_bouts << " Daily)\n";
  for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
    std::size_t missing = 0;
    for (const auto& r : table.rows)
      if (!r.features.get(f)) ++missing;
    if (missing > 0)
      log << "extract: " << FeatureVector::names()[f] << " missing in " << missing << " bouts\n";
  }
  if (table.rows.empty()) throw std::runtime_error("extract: no bouts produced from any recording");

  bundle.features_csv = config.out_dir / "features.csv";
  detail::stage("extract", [&] {
    write_feature_table(table, bundle.features_csv);
    return 0;
  });
  guard.add(bundle.features_csv);

  if (config.bout_step_s < config.bout_length_s)
    bundle.warnings.push_back(
        "overlapping bouts: neighbouring samples share data, so two-sample test "
        "p-values assume more independence than the samples have");

  // compare (needs both conditions)
  const bool have_both = tug_bouts > 0 && tug_bouts < table.rows.size();
  if (have_both) {
    const auto rows = detail::stage("compare", [&] {
      return compare_conditions(table, &bundle.warnings);
    });
    bundle.comparison_csv = config.out_dir / "comparison.csv";
    bundle.table4_txt = config.out_dir / "table4.txt";
    detail::stage("compare", [&] {
      csv::write_file(bundle.comparison_csv.string(), comparison_to_csv(rows));
      csv::write_file(bundle.table4_txt.string(), render_table4(rows));
      return 0;
    });
    guard.add(bundle.comparison_csv);
    guard.add(bundle.table4_txt);
    bundle.comparison_done = true;
    log << "compare: " << rows.size() << " characteristic rows\n";
  } else {
    bundle.warnings.push_back("only one condition present: comparison table skipped");
  }

  // characteristic-vs-score copula entropy
  CeOptions ce_opts;
  ce_opts.k = config.ksg_k;
  ce_opts.jitter_seed = config.seed;
  const auto ce_rows = detail::stage("ce", [&] {
    return dependence_with_score(table, ce_opts, 30, &bundle.warnings);
  });
  bundle.ce_csv = config.out_dir / "ce.csv";
  detail::stage("ce", [&] {
    csv::write_file(bundle.ce_csv.string(), ce_rows_to_csv(ce_rows));
    return 0;
  });
  guard.add(bundle.ce_csv);
  log << "ce: " << ce_rows.size() << " rows\n";

  // correlation matrices
  const auto matrices = detail::stage("correlate", [&] {
    return correlation_matrices(table, &bundle.warnings);
  });
  for (const auto& m : matrices) {
    const auto path =
        config.out_dir / ("corr_" + csv::lower(m.condition) + "_" + m.population + ".csv");
    detail::stage("correlate", [&] {
      csv::write_file(path.string(), correlation_matrix_to_csv(m));
      return 0;
    });
    guard.add(path);
    bundle.correlation_csvs.push_back(path);
  }
  log << "correlate: " << matrices.size() << " matrices\n";

  // TUG-score histograms (per recording)
  std::ostringstream hist_csv;
  hist_csv << "condition,bin_left,bin_right,count\n";
  for (const auto cond : {Condition::TUG, Condition::Daily}) {
    std::vector<double> scores;
    for (const auto& r : recordings)
      if (r.condition == cond) scores.push_back(r.tug_score_s);
    if (scores.empty()) continue;
    for (const auto& bin : histogram_data(scores, config.histogram_bin_width_s))
      hist_csv << to_string(cond) << ',' << csv::format_double(bin.left) << ','
               << csv::format_double(bin.right) << ',' << bin.count << '\n';
  }
  bundle.histogram_csv = config.out_dir / "histogram.csv";
  detail::stage("histogram", [&] {
    csv::write_file(bundle.histogram_csv.string(), hist_csv.str());
    return 0;
  });
  guard.add(bundle.histogram_csv);

  for (const auto& w : bundle.warnings) log << "WARN: " << w << '\n';
  bundle.run_log = config.out_dir / "run.log";
  csv::write_file(bundle.run_log.string(), log.str());

  guard.armed = false;
  return bundle;
}

}  // namespace gaitkit
