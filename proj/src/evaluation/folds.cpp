#include <algorithm>
#include <numeric>
#include <set>

#include "szt/errors.hpp"
#include "szt/evaluation.hpp"
#include "szt/rng.hpp"

namespace szt {

std::string_view to_string(CvMode mode) { return mode == CvMode::SeizureWise ? "seizure" : "patient"; }

CvMode parse_cv_mode(std::string_view name) {
  if (name == "seizure" || name == "seizure-wise") return CvMode::SeizureWise;
  if (name == "patient" || name == "patient-wise") return CvMode::PatientWise;
  throw UsageError("unknown CV mode \"" + std::string(name) + "\" (expected seizure or patient)");
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldAssignment seizure_wise_folds(std::span<const SeizureEvent> events, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("fold count must be >= 2");
  FoldAssignment out;
  out.k = k;
  out.mode = CvMode::SeizureWise;
  out.seed = seed;
  out.fold_of.assign(events.size(), -1);

  std::array<std::vector<std::size_t>, kNumClasses> by_type;
  for (std::size_t i = 0; i < events.size(); ++i) by_type[class_id(events[i].type)].push_back(i);
  for (int c = 0; c < kNumClasses; ++c) {
    const auto n = by_type[c].size();
    if (n > 0 && n < static_cast<std::size_t>(k)) {
      throw FoldError("seizure-wise folds: type " + std::string(to_code(static_cast<SeizureType>(c))) + " has " +
                      std::to_string(n) + " seizures, fewer than k = " + std::to_string(k));
    }
  }

  Rng rng(seed);
  std::size_t next = 0;
  for (auto& ids : by_type) {
    rng.shuffle(std::span<std::size_t>(ids));
    for (std::size_t id : ids) {
      out.fold_of[id] = static_cast<int>(next % static_cast<std::size_t>(k));
      ++next;
    }
  }
  return out;
}

FoldAssignment patient_wise_folds(std::span<const SeizureEvent> events, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("fold count must be >= 2");
  FoldAssignment out;
  out.k = k;
  out.mode = CvMode::PatientWise;
  out.seed = seed;
  out.fold_of.assign(events.size(), -1);

  std::array<std::set<std::string>, kNumClasses> patients;
  for (const auto& e : events) patients[class_id(e.type)].insert(e.patient_id);

  std::vector<int> order;
  for (int c = 0; c < kNumClasses; ++c) {
    if (!patients[c].empty()) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return patients[a].size() < patients[b].size(); });

  Rng rng(seed);
  std::size_t next = 0;
  for (int c : order) {
    out.type_order.push_back(static_cast<SeizureType>(c));
    std::vector<std::string> fresh;
    for (const auto& p : patients[c]) {
      if (!out.patient_fold.contains(p)) fresh.push_back(p);
    }
    if (fresh.size() < static_cast<std::size_t>(k)) {
      throw FoldError("patient-wise folds: type " + std::string(to_code(static_cast<SeizureType>(c))) + " has " +
                      std::to_string(fresh.size()) + " unallocated patients, fewer than k = " + std::to_string(k));
    }
    rng.shuffle(std::span<std::string>(fresh));
    for (const auto& p : fresh) {
      out.patient_fold[p] = static_cast<int>(next % static_cast<std::size_t>(k));
      ++next;
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i) out.fold_of[i] = out.patient_fold.at(events[i].patient_id);
  return out;
}

FoldAssignment make_folds(std::span<const SeizureEvent> events, CvMode mode, int k, std::uint64_t seed) {
  return mode == CvMode::SeizureWise ? seizure_wise_folds(events, k, seed) : patient_wise_folds(events, k, seed);
}

BalanceReport fold_balance_report(std::span<const SeizureEvent> events, int k, CvMode mode,
                                  std::span<const std::uint64_t> seeds) {
  if (seeds.size() < 2) throw UsageError("fold balance report needs at least 2 seeds");
  BalanceReport report;
  for (std::uint64_t seed : seeds) {
    const FoldAssignment folds = make_folds(events, mode, k, seed);
    SeedBalance b;
    b.seed = seed;
    b.fold_counts = folds.fold_sizes();
    const auto [lo, hi] = std::minmax_element(b.fold_counts.begin(), b.fold_counts.end());
    b.max_deviation = *hi - *lo;
    report.max_deviation = std::max(report.max_deviation, b.max_deviation);
    report.per_seed.push_back(std::move(b));
  }
  return report;
}

}  // namespace szt
