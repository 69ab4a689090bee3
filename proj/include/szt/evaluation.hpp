#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "szt/classifiers.hpp"
#include "szt/featurize.hpp"
#include "szt/ingest.hpp"

namespace szt {

enum class CvMode { SeizureWise, PatientWise };

std::string_view to_string(CvMode mode);
CvMode parse_cv_mode(std::string_view name);

struct FoldAssignment {
  int k = 0;
  CvMode mode = CvMode::SeizureWise;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;  // indexed by seizure id (event index)
  // Patient-wise only: type processing order and each patient's fold.
  std::vector<SeizureType> type_order;
  std::map<std::string, int> patient_fold;

  std::vector<std::size_t> fold_sizes() const;
};

// Per type (in type order) the seizures are shuffled and dealt round-robin;
// the dealing position carries over between types. Throws FoldError naming
// a type with fewer than k seizures.
FoldAssignment seizure_wise_folds(std::span<const SeizureEvent> events, int k = 5, std::uint64_t seed = 0);

// Types are visited by ascending distinct-patient count (ties by type order).
// Each type's not-yet-allocated patients are sorted, shuffled and dealt
// round-robin; earlier allocations are kept. Throws FoldError naming a type
// with fewer than k unallocated patients at its turn.
FoldAssignment patient_wise_folds(std::span<const SeizureEvent> events, int k = 3, std::uint64_t seed = 0);

FoldAssignment make_folds(std::span<const SeizureEvent> events, CvMode mode, int k, std::uint64_t seed);

struct SeedBalance {
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_counts;
  std::size_t max_deviation = 0;
};

struct BalanceReport {
  std::vector<SeedBalance> per_seed;
  std::size_t max_deviation = 0;
};

BalanceReport fold_balance_report(std::span<const SeizureEvent> events, int k, CvMode mode,
                                  std::span<const std::uint64_t> seeds);

// ---- metrics ----------------------------------------------------------------

struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};  // [true][pred]

  void add(int truth, int predicted) { ++counts[truth][predicted]; }
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

std::array<ClassMetrics, kNumClasses> class_metrics(const ConfusionMatrix& cm);
// Support-weighted mean of per-class F1; zero denominators give zero. Throws
// DataError on an empty matrix.
double weighted_f1(const ConfusionMatrix& cm);

// ---- cross-validation driver ----------------------------------------------

struct FoldResult {
  int fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double weighted_f1 = 0.0;
  ConfusionMatrix confusion;
  // Majority vote over each test seizure's windows; reported, never used for selection.
  double seizure_weighted_f1 = 0.0;
  ConfusionMatrix seizure_confusion;
};

struct MetricsReport {
  CvMode mode = CvMode::SeizureWise;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  double mean_weighted_f1 = 0.0;  // unweighted mean over folds
  double mean_seizure_weighted_f1 = 0.0;
  ConfusionMatrix pooled;
  std::array<ClassMetrics, kNumClasses> per_class{};
  std::vector<std::string> warnings;
  nlohmann::json spec;  // caller-supplied echo of the run configuration
};

struct CvOptions {
  bool standardize = true;
  std::uint64_t seed = 0;
  int workers = 1;
  nlohmann::json spec = nlohmann::json::object();
  // Observes the scaling statistics fitted for each fold.
  std::function<void(int fold, const ColumnStats&)> on_standardize;
};

// Fits on windows of seizures outside the fold and evaluates the fold's
// windows, for every fold. Throws FoldError when a fold has no windows.
MetricsReport run_cv(const FeatureMatrix& features, const ModelConfig& model, const FoldAssignment& folds,
                     const CvOptions& options = {});

FoldResult run_fold(const FeatureMatrix& features, const ModelConfig& model, const FoldAssignment& folds, int fold,
                    const CvOptions& options, std::vector<std::string>* warnings = nullptr);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& doc);

}  // namespace szt
