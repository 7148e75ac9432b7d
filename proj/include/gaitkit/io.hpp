#pragma once

// Manifest and recording file I/O.
//
// Manifest: CSV with header
//   subject_id,group,site,condition,tug_score,sample_rate,path
// where group/condition are case-insensitive and whitespace-trimmed, and path
// is relative to the manifest's directory.
//
// Recording: CSV with header t,pos_ap,pos_ml,pos_v in SI units.

#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaitkit/core.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/signal.hpp"

namespace gaitkit {

struct RecordingDescriptor {
  SubjectMeta meta;
  Condition condition = Condition::TUG;
  double tug_score_s = 0.0;
  double sample_rate_hz = 0.0;
  std::filesystem::path path;  // resolved against the manifest directory
};

inline Condition parse_condition(std::string_view token, const std::string& context) {
  const std::string v = csv::lower(csv::trim(token));
  if (v == "tug") return Condition::TUG;
  if (v == "daily") return Condition::Daily;
  throw std::runtime_error(context + ": unknown condition '" + csv::trim(token) + "'");
}

inline Group parse_group(std::string_view token, const std::string& context) {
  const std::string v = csv::lower(csv::trim(token));
  if (v == "patient") return Group::Patient;
  if (v == "control") return Group::Control;
  throw std::runtime_error(context + ": unknown group '" + csv::trim(token) + "'");
}

inline std::vector<RecordingDescriptor> parse_manifest(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path.string());
  if (lines.empty()) throw std::runtime_error("manifest: empty file: " + path.string());
  static const std::vector<std::string> expected = {
      "subject_id", "group", "site", "condition", "tug_score", "sample_rate", "path"};
  const auto header = csv::split_line(lines[0]);
  if (header.size() != expected.size())
    throw std::runtime_error("manifest: expected 7 header columns, got " +
                             std::to_string(header.size()));
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (csv::lower(csv::trim(header[i])) != expected[i])
      throw std::runtime_error("manifest: header column " + std::to_string(i + 1) +
                               " should be '" + expected[i] + "'");

  const auto base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::vector<RecordingDescriptor> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (csv::trim(lines[row]).empty()) continue;
    const std::string ctx = "manifest row " + std::to_string(row + 1);
    const auto fields = csv::split_line(lines[row]);
    if (fields.size() != expected.size())
      throw std::runtime_error(ctx + ": expected 7 fields, got " + std::to_string(fields.size()));

    RecordingDescriptor d;
    d.meta.subject_id = csv::trim(fields[0]);
    if (d.meta.subject_id.empty()) throw std::runtime_error(ctx + ": field subject_id is empty");
    d.meta.group = parse_group(fields[1], ctx + ", field group");
    d.meta.site = csv::trim(fields[2]);
    d.condition = parse_condition(fields[3], ctx + ", field condition");
    d.tug_score_s = csv::parse_double(fields[4], ctx + ", field tug_score");
    if (!(d.tug_score_s > 0.0)) throw std::runtime_error(ctx + ": tug_score must be positive");
    d.sample_rate_hz = csv::parse_double(fields[5], ctx + ", field sample_rate");
    if (!(d.sample_rate_hz > 0.0)) throw std::runtime_error(ctx + ": sample_rate must be positive");
    const std::string rel = csv::trim(fields[6]);
    if (rel.empty()) throw std::runtime_error(ctx + ": field path is empty");
    d.path = base_dir / rel;

    if (!seen.emplace(d.meta.subject_id, rel).second)
      throw std::runtime_error(ctx + ": duplicate (subject_id, path) pair");
    out.push_back(std::move(d));
  }
  return out;
}

/// Reads a recording CSV, re-bases timestamps to start at 0 and, when the raw
/// gaps deviate more than 10% from 1/rate, resamples onto the declared rate.
inline SampleSeries parse_recording(const std::filesystem::path& path, const SubjectMeta& meta,
                                    double rate_hz, Condition condition, double tug_score_s) {
  const auto lines = csv::read_lines(path.string());
  if (lines.empty()) throw std::runtime_error("recording: empty file: " + path.string());
  const auto header = csv::split_line(lines[0]);
  static const std::vector<std::string> expected = {"t", "pos_ap", "pos_ml", "pos_v"};
  if (header.size() != expected.size())
    throw std::runtime_error("recording " + path.string() + ": expected columns t,pos_ap,pos_ml,pos_v");
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (csv::lower(csv::trim(header[i])) != expected[i])
      throw std::runtime_error("recording " + path.string() + ": missing column '" + expected[i] + "'");

  SampleSeries s;
  s.subject_id = meta.subject_id;
  s.condition = condition;
  s.sample_rate_hz = rate_hz;
  s.tug_score_s = tug_score_s;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (csv::trim(lines[row]).empty()) continue;
    const std::string ctx = path.filename().string() + " row " + std::to_string(row + 1);
    const auto fields = csv::split_line(lines[row]);
    if (fields.size() != 4)
      throw std::runtime_error(ctx + ": expected 4 fields, got " + std::to_string(fields.size()));
    const double t = csv::parse_double(fields[0], ctx + ", column t");
    if (!s.t.empty() && !(t > s.t.back()))
      throw std::runtime_error("non-monotone timestamp at row " + std::to_string(row + 1) + " in " +
                               path.filename().string());
    s.t.push_back(t);
    s.pos_ap.push_back(csv::parse_double(fields[1], ctx + ", column pos_ap"));
    s.pos_ml.push_back(csv::parse_double(fields[2], ctx + ", column pos_ml"));
    s.pos_v.push_back(csv::parse_double(fields[3], ctx + ", column pos_v"));
  }
  if (s.t.size() < 2)
    throw std::runtime_error("recording " + path.string() + ": need at least 2 samples");

  const double t0 = s.t.front();
  for (double& t : s.t) t -= t0;

  const double period = 1.0 / rate_hz;
  bool uniform = true;
  for (std::size_t i = 1; i < s.t.size(); ++i)
    if (std::abs((s.t[i] - s.t[i - 1]) - period) > 0.10 * period) {
      uniform = false;
      break;
    }
  if (!uniform) s = resample(s, rate_hz);
  s.validate();
  return s;
}

inline SampleSeries load_recording(const RecordingDescriptor& d) {
  return parse_recording(d.path, d.meta, d.sample_rate_hz, d.condition, d.tug_score_s);
}

/// Writes a recording in the exact format parse_recording reads. Values use
/// shortest round-trip formatting, so write -> parse reproduces them bit for bit.
inline void write_recording(const SampleSeries& s, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "t,pos_ap,pos_ml,pos_v\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << csv::format_double(s.t[i]) << ',' << csv::format_double(s.pos_ap[i]) << ','
        << csv::format_double(s.pos_ml[i]) << ',' << csv::format_double(s.pos_v[i]) << '\n';
  csv::write_file(path.string(), out.str());
}

struct ManifestRow {
  SubjectMeta meta;
  Condition condition;
  double tug_score_s;
  double sample_rate_hz;
  std::string relative_path;
};

inline void write_manifest(const std::vector<ManifestRow>& rows,
                           const std::filesystem::path& path) {
  std::ostringstream out;
  out << "subject_id,group,site,condition,tug_score,sample_rate,path\n";
  for (const auto& r : rows)
    out << r.meta.subject_id << ',' << to_string(r.meta.group) << ',' << r.meta.site << ','
        << to_string(r.condition) << ',' << csv::format_double(r.tug_score_s) << ','
        << csv::format_double(r.sample_rate_hz) << ',' << r.relative_path << '\n';
  csv::write_file(path.string(), out.str());
}

}  // namespace gaitkit
