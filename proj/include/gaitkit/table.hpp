#pragma once

// The per-bout feature table: the sample set every downstream analysis
// (two-sample tests, correlations, copula entropy) runs on.
//
// CSV format, one row per bout:
//   subject_id,condition,group,tug_score,bout_start,speed,pace,speed_var,
//   stride_time,stride_time_var,stride_freq,movement_intensity,low_freq_pct,
//   accel_range
// Missing characteristics serialize as empty fields.

#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/core.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/features.hpp"
#include "gaitkit/io.hpp"

namespace gaitkit {

struct FeatureRow {
  std::string subject_id;
  Condition condition = Condition::TUG;
  Group group = Group::Control;
  double tug_score_s = 0.0;
  double bout_start_s = 0.0;
  FeatureVector features;
};

struct FeatureTable {
  std::vector<FeatureRow> rows;
};

inline std::string feature_table_header() {
  std::string h = "subject_id,condition,group,tug_score,bout_start";
  for (const auto& name : FeatureVector::names()) h += "," + name;
  return h;
}

inline std::string to_csv(const FeatureTable& table) {
  std::ostringstream out;
  out << feature_table_header() << '\n';
  for (const auto& r : table.rows) {
    out << r.subject_id << ',' << to_string(r.condition) << ',' << to_string(r.group) << ','
        << csv::format_double(r.tug_score_s) << ',' << csv::format_double(r.bout_start_s);
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
      out << ',';
      if (const auto v = r.features.get(i)) out << csv::format_double(*v);
    }
    out << '\n';
  }
  return out.str();
}

inline void write_feature_table(const FeatureTable& table, const std::filesystem::path& path) {
  csv::write_file(path.string(), to_csv(table));
}

inline FeatureTable read_feature_table(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path.string());
  if (lines.empty()) throw std::runtime_error("feature table: empty file: " + path.string());
  if (csv::trim(lines[0]) != feature_table_header())
    throw std::runtime_error("feature table: unexpected header in " + path.string());
  FeatureTable table;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (csv::trim(lines[row]).empty()) continue;
    const std::string ctx = "feature table row " + std::to_string(row + 1);
    const auto fields = csv::split_line(lines[row]);
    if (fields.size() != 5 + FeatureVector::kCount)
      throw std::runtime_error(ctx + ": wrong field count");
    FeatureRow r;
    r.subject_id = csv::trim(fields[0]);
    r.condition = parse_condition(fields[1], ctx);
    r.group = parse_group(fields[2], ctx);
    r.tug_score_s = csv::parse_double(fields[3], ctx + ", tug_score");
    r.bout_start_s = csv::parse_double(fields[4], ctx + ", bout_start");
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i)
      r.features.set(i, csv::parse_optional_double(fields[5 + i], ctx));
    table.rows.push_back(std::move(r));
  }
  return table;
}

/// Values of one characteristic over rows matching the condition filter
/// (nullopt = both conditions), skipping rows where it is missing.
inline std::vector<double> feature_column(const FeatureTable& table, std::size_t feature_index,
                                          std::optional<Condition> condition = std::nullopt) {
  std::vector<double> out;
  for (const auto& r : table.rows) {
    if (condition && r.condition != *condition) continue;
    if (const auto v = r.features.get(feature_index)) out.push_back(*v);
  }
  return out;
}

}  // namespace gaitkit
