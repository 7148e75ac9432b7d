// gaitkit command-line interface.
//
// Subcommands:
//   ingest   validate a manifest and its recordings
//   segment  detect walking intervals and write the bout list
//   extract  write the per-bout feature table
//   compare  two-sample condition comparison from a feature table
//   ce       characteristic-vs-score copula entropies from a feature table
//   run      full pipeline: ingest -> segment -> extract -> compare -> ce
//   synth    generate a synthetic two-condition dataset
//
// Exit codes: 0 success, 1 input error, 2 analysis degeneracy (e.g. a
// comparison requested with only one condition present).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitkit/gaitkit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitDegenerate = 2;

struct CliConfig {
  gaitkit::AnalysisConfig analysis;
  std::string manifest;
  std::string features_file;
  std::string out_dir = "out";
};

/// Shared analysis options live on the top-level app; subcommands reach them
/// through fallthrough, and a flat key=value --config file binds to the same
/// names.
void add_analysis_options(CLI::App& app, CliConfig& cfg) {
  app.add_option("--bout-length", cfg.analysis.bout_length_s, "Bout length in seconds")
      ->capture_default_str();
  app.add_option("--bout-step", cfg.analysis.bout_step_s, "Step between bout starts in seconds")
      ->capture_default_str();
  app.add_option("--speed-threshold", cfg.analysis.speed_threshold_mps,
                 "Walking speed threshold in m/s")
      ->capture_default_str();
  app.add_option("--low-freq-threshold", cfg.analysis.low_freq_threshold_hz,
                 "Low-frequency-percentage threshold in Hz")
      ->capture_default_str();
  app.add_option("--k", cfg.analysis.ksg_k, "Neighbor count for the CE estimator")
      ->capture_default_str();
  app.add_option("--bin-width", cfg.analysis.histogram_bin_width_s,
                 "TUG-score histogram bin width in seconds")
      ->capture_default_str();
  app.add_option("--seed", cfg.analysis.seed, "Seed for deterministic tie jitter")
      ->capture_default_str();
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
}

std::vector<gaitkit::SampleSeries> load_all(const std::string& manifest,
                                            std::map<std::string, gaitkit::Group>* groups) {
  const auto descriptors = gaitkit::parse_manifest(manifest);
  std::vector<gaitkit::SampleSeries> recordings;
  recordings.reserve(descriptors.size());
  for (const auto& d : descriptors) {
    recordings.push_back(gaitkit::load_recording(d));
    if (groups) (*groups)[d.meta.subject_id] = d.meta.group;
  }
  return recordings;
}

int cmd_ingest(const CliConfig& cfg) {
  std::map<std::string, gaitkit::Group> groups;
  const auto recordings = load_all(cfg.manifest, &groups);
  std::size_t n_tug = 0;
  for (const auto& r : recordings)
    if (r.condition == gaitkit::Condition::TUG) ++n_tug;
  std::cout << "ok: " << recordings.size() << " recordings (" << n_tug << " TUG, "
            << recordings.size() - n_tug << " Daily), " << groups.size() << " subjects\n";
  return kExitOk;
}

int cmd_segment(const CliConfig& cfg) {
  const auto recordings = load_all(cfg.manifest, nullptr);
  const auto seg = cfg.analysis.segmentation_options();
  std::ostringstream out;
  out << "subject_id,condition,tug_score,start_time,length\n";
  std::size_t total = 0;
  for (const auto& series : recordings) {
    const auto intervals = gaitkit::detect_walking(series, seg.speed_threshold_mps,
                                                   seg.min_duration_s, seg.smoothing_window_s);
    const auto bouts = gaitkit::generate_bouts(series, intervals, seg.bout_length_s, seg.bout_step_s);
    for (const auto& b : bouts)
      out << b.subject_id << ',' << gaitkit::to_string(b.condition) << ','
          << gaitkit::csv::format_double(b.tug_score_s) << ','
          << gaitkit::csv::format_double(b.start_time_s) << ','
          << gaitkit::csv::format_double(b.length_s) << '\n';
    total += bouts.size();
  }
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / "bouts.csv";
  gaitkit::csv::write_file(path.string(), out.str());
  std::cout << "wrote " << total << " bouts to " << path.string() << '\n';
  return kExitOk;
}

int cmd_extract(const CliConfig& cfg) {
  std::map<std::string, gaitkit::Group> groups;
  const auto recordings = load_all(cfg.manifest, &groups);
  std::vector<std::string> warnings;
  const auto table =
      gaitkit::extract_feature_table(recordings, groups, cfg.analysis, &warnings, nullptr);
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / "features.csv";
  gaitkit::write_feature_table(table, path);
  for (const auto& w : warnings) std::cerr << "WARN: " << w << '\n';
  std::cout << "wrote " << table.rows.size() << " feature rows to " << path.string() << '\n';
  return kExitOk;
}

int cmd_compare(const CliConfig& cfg) {
  const auto table = gaitkit::read_feature_table(cfg.features_file);
  bool has_tug = false;
  bool has_daily = false;
  for (const auto& r : table.rows)
    (r.condition == gaitkit::Condition::TUG ? has_tug : has_daily) = true;
  if (!has_tug || !has_daily) {
    std::cerr << "error: comparison needs both conditions in the feature table\n";
    return kExitDegenerate;
  }
  std::vector<std::string> warnings;
  const auto rows = gaitkit::compare_conditions(table, &warnings);
  std::filesystem::create_directories(cfg.out_dir);
  const auto csv_path = std::filesystem::path(cfg.out_dir) / "comparison.csv";
  const auto txt_path = std::filesystem::path(cfg.out_dir) / "table4.txt";
  gaitkit::csv::write_file(csv_path.string(), gaitkit::comparison_to_csv(rows));
  gaitkit::csv::write_file(txt_path.string(), gaitkit::render_table4(rows));
  for (const auto& w : warnings) std::cerr << "WARN: " << w << '\n';
  std::cout << gaitkit::render_table4(rows);
  return kExitOk;
}

int cmd_ce(const CliConfig& cfg) {
  const auto table = gaitkit::read_feature_table(cfg.features_file);
  gaitkit::CeOptions opts;
  opts.k = cfg.analysis.ksg_k;
  opts.jitter_seed = cfg.analysis.seed;
  std::vector<std::string> warnings;
  const auto rows = gaitkit::dependence_with_score(table, opts, 30, &warnings);
  if (rows.empty()) {
    std::cerr << "error: no characteristic had enough complete rows for CE\n";
    return kExitDegenerate;
  }
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / "ce.csv";
  gaitkit::csv::write_file(path.string(), gaitkit::ce_rows_to_csv(rows));
  for (const auto& w : warnings) std::cerr << "WARN: " << w << '\n';
  std::cout << "wrote " << rows.size() << " CE rows to " << path.string() << '\n';
  return kExitOk;
}

int cmd_run(const CliConfig& cfg) {
  gaitkit::AnalysisConfig config = cfg.analysis;
  config.manifest_path = cfg.manifest;
  config.out_dir = cfg.out_dir;
  const auto bundle = gaitkit::run_pipeline(config);
  for (const auto& w : bundle.warnings) std::cerr << "WARN: " << w << '\n';
  std::cout << "pipeline finished: " << bundle.n_bouts << " bouts, outputs in "
            << config.out_dir.string() << '\n';
  return bundle.comparison_done ? kExitOk : kExitDegenerate;
}

struct SynthConfig {
  int subjects = 20;
  double duration = 60.0;
  double rate = 30.0;
  double noise_sd = 0.0005;
  double daily_speed_scale = 0.7;
  double daily_period_scale = 1.0;
};

int cmd_synth(const SynthConfig& sc, const std::string& out_dir, std::uint64_t seed) {
  gaitkit::DatasetParams dp;
  dp.base = gaitkit::make_walk_params(0.7, 0.55);
  dp.base.duration_s = sc.duration;
  dp.base.rate_hz = sc.rate;
  dp.base.noise_sd_m = sc.noise_sd;
  dp.base.speed_wobble_frac = 0.08;
  dp.subjects = sc.subjects;
  dp.seed = seed;
  dp.daily.speed = sc.daily_speed_scale;
  dp.daily.step_period = sc.daily_period_scale;
  const auto dataset = gaitkit::gen_two_condition_dataset(dp, out_dir);
  std::cout << "wrote " << dataset.subjects.size() << " subjects to "
            << dataset.manifest_path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait characteristics, condition comparison and copula-entropy analysis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Configuration file (flat key=value lines; flags override it)");

  CliConfig cfg;
  SynthConfig synth_cfg;
  add_analysis_options(app, cfg);

  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and its recordings");
  ingest->add_option("manifest", cfg.manifest, "Manifest CSV path")->required();

  auto* segment = app.add_subcommand("segment", "Detect walking and write the bout list");
  segment->add_option("manifest", cfg.manifest, "Manifest CSV path")->required();

  auto* extract = app.add_subcommand("extract", "Write the per-bout feature table");
  extract->add_option("manifest", cfg.manifest, "Manifest CSV path")->required();

  auto* compare = app.add_subcommand("compare", "Two-sample condition comparison");
  compare->add_option("--features", cfg.features_file, "Feature table CSV")->required();

  auto* ce = app.add_subcommand("ce", "Characteristic-vs-score copula entropies");
  ce->add_option("--features", cfg.features_file, "Feature table CSV")->required();

  auto* run = app.add_subcommand("run", "Full analysis pipeline");
  run->add_option("manifest", cfg.manifest, "Manifest CSV path")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic two-condition dataset");
  synth->add_option("--subjects", synth_cfg.subjects, "Number of subjects")->capture_default_str();
  synth->add_option("--duration", synth_cfg.duration, "Recording duration in seconds")
      ->capture_default_str();
  synth->add_option("--rate", synth_cfg.rate, "Sample rate in Hz")->capture_default_str();
  synth->add_option("--noise-sd", synth_cfg.noise_sd, "Position noise SD in meters")
      ->capture_default_str();
  synth->add_option("--daily-speed-scale", synth_cfg.daily_speed_scale,
                    "Daily-condition speed factor")
      ->capture_default_str();
  synth->add_option("--daily-period-scale", synth_cfg.daily_period_scale,
                    "Daily-condition step-period factor")
      ->capture_default_str();

  for (auto* sub : {ingest, segment, extract, compare, ce, run, synth}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(cfg);
    if (segment->parsed()) return cmd_segment(cfg);
    if (extract->parsed()) return cmd_extract(cfg);
    if (compare->parsed()) return cmd_compare(cfg);
    if (ce->parsed()) return cmd_ce(cfg);
    if (run->parsed()) return cmd_run(cfg);
    if (synth->parsed()) return cmd_synth(synth_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
