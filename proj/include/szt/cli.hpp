#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "szt/classifiers.hpp"
#include "szt/evaluation.hpp"
#include "szt/featurize.hpp"
#include "szt/hpo.hpp"
#include "szt/synthgen.hpp"

namespace szt::cli {

// Everything a command needs, resolved from defaults, an optional JSON config
// file and command-line flags (in that order of precedence).
struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path out = "out";
  std::filesystem::path cache_dir;  // empty: <out>/cache
  std::filesystem::path run_dir;    // report input
  std::vector<std::string> montage = default_montage(20);
  double target_fs = 250.0;

  FeatureMethod method = FeatureMethod::LogSpectrum;
  int fmax_hz = 48;
  double window_s = 1.0;
  double overlap_ratio = 0.75;  // O = ratio * W_l
  double log_floor = 1e-10;
  // Extra (f_max, W_l, ratio) points for cv; when non-empty they replace the single point above.
  std::vector<PreprocPoint> points;

  ClassifierKind classifier = ClassifierKind::Knn;
  std::vector<ClassifierKind> classifiers;  // cv/sweep: several at once; empty means {classifier}
  nlohmann::json params = nlohmann::json::object();  // classifier name -> hyperparameters

  CvMode cv = CvMode::SeizureWise;
  std::optional<int> folds;  // default 5 seizure-wise, 3 patient-wise
  bool standardize = true;
  std::uint64_t seed = 0;
  int workers = 1;

  std::size_t budget = 100;
  int sweep_fold = 0;
  std::size_t top = 4;
  std::vector<PreprocPoint> grid = preproc_grid();

  GenSpec genspec;

  int fold_count() const;
  PreprocPoint point() const { return {fmax_hz, window_s, overlap_ratio}; }
  std::vector<PreprocPoint> cv_points() const;
  std::vector<ClassifierKind> classifier_list() const;
  ModelConfig model_config(ClassifierKind kind) const;
  std::filesystem::path cache_root() const;
  void validate() const;
  // Grid points are only checked by the sweep command.
  void validate_grid() const;
};

// Schema-checked; errors name the offending path, e.g. "config.grid[3].fmax".
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

// Writes <out>/config.resolved.json.
void echo_config(const RunConfig& config, std::string_view command);

// ---- commands ---------------------------------------------------------------

struct CommandOutput {
  std::string stdout_text;
};

CommandOutput cmd_stats(const RunConfig& config);
CommandOutput cmd_synth(const RunConfig& config);
CommandOutput cmd_featurize(const RunConfig& config);
CommandOutput cmd_cv(const RunConfig& config);
CommandOutput cmd_sweep(const RunConfig& config);
CommandOutput cmd_search(const RunConfig& config);
CommandOutput cmd_report(const RunConfig& config);

// Loads the manifest; throws DataError("empty manifest") when it has no events.
Manifest load_nonempty_manifest(const std::filesystem::path& path);

// Featurizes through the on-disk cache. Sets *hit when the cache answered.
FeatureMatrix cached_features(const RunConfig& config, const Manifest& manifest, const WindowSpec& window,
                              const FeatureSpec& feature, bool* hit = nullptr);
// <cache_root>/<manifest key>_m<method>_f<fmax>_w<W_l>_o<O>[_e<floor>]_<montage hash>.szft
std::filesystem::path cache_path(const RunConfig& config, const Manifest& manifest, const WindowSpec& window,
                                 const FeatureSpec& feature);

// ---- tables -----------------------------------------------------------------

struct CvRun {
  PreprocPoint point;
  ClassifierKind classifier = ClassifierKind::Knn;
  MetricsReport report;
};

// Rows are (f_max, W_l, O) in first-seen order, columns are classifiers.
std::string results_table(const std::vector<CvRun>& runs, CvMode mode, int k);
nlohmann::json runs_to_json(const std::vector<CvRun>& runs);
std::vector<CvRun> runs_from_json(const nlohmann::json& doc);

// Runs a command by name with exit-code mapping; returns the process exit code.
int run_command(const std::string& name, const RunConfig& config);

}  // namespace szt::cli
