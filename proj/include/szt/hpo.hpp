#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "szt/classifiers.hpp"
#include "szt/evaluation.hpp"
#include "szt/featurize.hpp"
#include "szt/rng.hpp"

namespace szt {

struct Dimension {
  enum class Kind { Integer, Real, Categorical };

  std::string name;
  Kind kind = Kind::Real;
  double lo = 0.0;
  double hi = 1.0;
  bool log_scale = false;
  std::vector<std::string> categories;

  static Dimension integer(std::string name, int lo, int hi);
  static Dimension real(std::string name, double lo, double hi, bool log_scale = false);
  static Dimension categorical(std::string name, std::vector<std::string> values);
};

struct SearchSpace {
  std::vector<Dimension> dims;

  void validate() const;
  nlohmann::json sample(Rng& rng) const;
};

SearchSpace default_space(ClassifierKind kind);

// Trial i's configuration depends only on (space, seed, i).
nlohmann::json sample_trial_config(const SearchSpace& space, std::uint64_t seed, std::size_t index);

enum class TrialStatus { Ok, Failed };

struct Trial {
  std::size_t index = 0;
  nlohmann::json config;
  double objective = 0.0;
  TrialStatus status = TrialStatus::Ok;
  std::string error;
  double duration_s = 0.0;
};

struct SearchResult {
  std::vector<Trial> trials;  // sampling order
  std::size_t best_index = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string sampler = "random-v1";

  const Trial& best() const { return trials.at(best_index); }
};

using Objective = std::function<double(const nlohmann::json& config)>;

// Evaluates `budget` pre-sampled configurations (up to `workers` at a time).
// Trials whose objective throws are recorded as failed; the best is the
// earliest maximum among successful trials. Throws NumericError if every
// trial failed.
SearchResult random_search(const SearchSpace& space, const Objective& objective, std::size_t budget,
                           std::uint64_t seed, int workers = 1);

// One JSON object per line: index, config, objective, status, duration.
std::string trial_log_jsonl(const SearchResult& result);

// ---- preprocessing grid ---------------------------------------------------

struct PreprocPoint {
  int fmax_hz = 48;
  double window_s = 1.0;
  double overlap_ratio = 0.75;  // O = ratio * W_l

  double overlap_s() const { return overlap_ratio * window_s; }
  WindowSpec window() const { return {window_s, overlap_s()}; }
  bool operator==(const PreprocPoint&) const = default;
};

inline constexpr std::array<int, 5> kGridFmax = {12, 24, 48, 64, 96};
inline constexpr std::array<double, 5> kGridWindow = {1, 2, 4, 8, 16};
inline constexpr std::array<double, 2> kGridOverlapRatio = {0.5, 0.75};

// All 50 combinations; f_max outermost, overlap ratio innermost.
std::vector<PreprocPoint> preproc_grid();

struct SweepRow {
  FeatureMethod method = FeatureMethod::LogSpectrum;
  ClassifierKind classifier = ClassifierKind::Knn;
  PreprocPoint point;
  std::size_t grid_index = 0;
  double weighted_f1 = 0.0;
  nlohmann::json best_config;
};

using FeatureProvider = std::function<FeatureMatrix(const WindowSpec&, const FeatureSpec&)>;

struct SweepOptions {
  FeatureMethod method = FeatureMethod::LogSpectrum;
  ClassifierKind classifier = ClassifierKind::Knn;
  CvMode mode = CvMode::SeizureWise;
  int folds = 5;
  int fold = 0;  // the single split each grid point is scored on
  std::size_t budget = 100;
  std::uint64_t seed = 0;
  bool standardize = true;
  int workers = 1;
  double log_floor = 1e-10;
  std::vector<PreprocPoint> grid = preproc_grid();
  std::optional<SearchSpace> space;  // default_space(classifier) when unset
  // Called after each grid point with its trials.
  std::function<void(const SweepRow&, const SearchResult&)> on_point;
};

std::vector<SweepRow> sweep_preproc_grid(std::span<const SeizureEvent> events, const FeatureProvider& features,
                                         const SweepOptions& options);

// CSV: method,classifier,f_max,W_l,O,weighted_f1
std::string sweep_csv(std::span<const SweepRow> rows);
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

// Best n distinct grid points by score (each point scored by its best row),
// ties by grid order. Throws UsageError if fewer than n points exist.
std::vector<PreprocPoint> select_top_configs(std::span<const SweepRow> rows, std::size_t n = 4);

}  // namespace szt
