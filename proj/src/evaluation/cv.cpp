#include <algorithm>
#include <map>
#include <numeric>

#include "szt/errors.hpp"
#include "szt/evaluation.hpp"
#include "szt/log.hpp"
#include "szt/rng.hpp"

namespace szt {
namespace {

RealMatrix take_rows(const RealMatrix& x, std::span<const std::size_t> rows) {
  std::vector<double> values;
  values.reserve(rows.size() * x.cols());
  for (std::size_t r : rows) {
    const auto src = x.row(r);
    values.insert(values.end(), src.begin(), src.end());
  }
  return RealMatrix(rows.size(), x.cols(), std::move(values));
}

int majority(const std::array<std::size_t, kNumClasses>& votes) {
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace

FoldResult run_fold(const FeatureMatrix& features, const ModelConfig& model, const FoldAssignment& folds, int fold,
                    const CvOptions& options, std::vector<std::string>* warnings) {
  const std::size_t n = features.rows();
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t r = 0; r < n; ++r) {
    const std::uint32_t sid = features.seizure_ids[r];
    if (sid >= folds.fold_of.size()) throw FoldError("run_cv: seizure id outside the fold assignment");
    (folds.fold_of[sid] == fold ? test_rows : train_rows).push_back(r);
  }
  if (test_rows.empty()) throw FoldError("run_cv: fold " + std::to_string(fold) + " has no windows");
  if (train_rows.empty()) throw FoldError("run_cv: training split for fold " + std::to_string(fold) + " is empty");

  Dataset train{take_rows(features.features, train_rows), {}};
  RealMatrix test = take_rows(features.features, test_rows);
  for (std::size_t r : train_rows) train.y.push_back(features.labels[r]);

  std::array<bool, kNumClasses> in_train{};
  std::array<bool, kNumClasses> in_test{};
  for (int y : train.y) in_train[y] = true;
  for (std::size_t r : test_rows) in_test[features.labels[r]] = true;
  for (int c = 0; c < kNumClasses; ++c) {
    if (in_test[c] && !in_train[c]) {
      const std::string msg = "fold " + std::to_string(fold) + ": class " +
                              std::string(to_code(static_cast<SeizureType>(c))) + " absent from training split";
      log::warn("class_missing_from_training", {{"fold", fold}, {"class", to_code(static_cast<SeizureType>(c))}});
      if (warnings != nullptr) warnings->push_back(msg);
    }
  }

  if (options.standardize) {
    const ColumnStats stats = standardize_fit(train.x);
    if (options.on_standardize) options.on_standardize(fold, stats);
    train.x = standardize_apply(stats, train.x);
    test = standardize_apply(stats, test);
  }

  const Model fitted = fit_model(model, train, mix_seed(options.seed, static_cast<std::uint64_t>(fold)),
                                 options.workers);
  const std::vector<int> predicted = predict_labels(fitted, test, options.workers);

  FoldResult result;
  result.fold = fold;
  result.train_rows = train_rows.size();
  result.test_rows = test_rows.size();
  std::map<std::uint32_t, std::pair<int, std::array<std::size_t, kNumClasses>>> per_seizure;
  for (std::size_t i = 0; i < test_rows.size(); ++i) {
    const int truth = features.labels[test_rows[i]];
    result.confusion.add(truth, predicted[i]);
    auto& entry = per_seizure[features.seizure_ids[test_rows[i]]];
    entry.first = truth;
    ++entry.second[predicted[i]];
  }
  for (const auto& [sid, entry] : per_seizure) result.seizure_confusion.add(entry.first, majority(entry.second));
  result.weighted_f1 = weighted_f1(result.confusion);
  result.seizure_weighted_f1 = weighted_f1(result.seizure_confusion);
  return result;
}

MetricsReport run_cv(const FeatureMatrix& features, const ModelConfig& model, const FoldAssignment& folds,
                     const CvOptions& options) {
  if (features.rows() == 0) throw DataError("run_cv: empty feature matrix");
  MetricsReport report;
  report.mode = folds.mode;
  report.k = folds.k;
  report.seed = folds.seed;
  report.spec = options.spec;
  for (int f = 0; f < folds.k; ++f) {
    report.folds.push_back(run_fold(features, model, folds, f, options, &report.warnings));
  }
  double sum = 0.0;
  double seizure_sum = 0.0;
  for (const auto& fr : report.folds) {
    sum += fr.weighted_f1;
    seizure_sum += fr.seizure_weighted_f1;
    report.pooled += fr.confusion;
  }
  report.mean_weighted_f1 = sum / static_cast<double>(report.folds.size());
  report.mean_seizure_weighted_f1 = seizure_sum / static_cast<double>(report.folds.size());
  report.per_class = class_metrics(report.pooled);
  return report;
}

namespace {

nlohmann::json confusion_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : cm.counts) rows.push_back(row);
  return rows;
}

ConfusionMatrix confusion_from(const nlohmann::json& j) {
  ConfusionMatrix cm;
  for (int i = 0; i < kNumClasses; ++i) {
    for (int j2 = 0; j2 < kNumClasses; ++j2) cm.counts[i][j2] = j.at(i).at(j2).get<std::uint64_t>();
  }
  return cm;
}

}  // namespace

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"train_rows", f.train_rows},
                     {"test_rows", f.test_rows},
                     {"weighted_f1", f.weighted_f1},
                     {"confusion", confusion_json(f.confusion)},
                     {"seizure_weighted_f1", f.seizure_weighted_f1},
                     {"seizure_confusion", confusion_json(f.seizure_confusion)}});
  }
  nlohmann::json classes = nlohmann::json::object();
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& m = report.per_class[c];
    classes[std::string(to_code(static_cast<SeizureType>(c)))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  return {{"cv_mode", to_string(report.mode)},
          {"folds_k", report.k},
          {"fold_seed", report.seed},
          {"evaluation_unit", "window"},
          {"folds", folds},
          {"mean_weighted_f1", report.mean_weighted_f1},
          {"mean_seizure_weighted_f1", report.mean_seizure_weighted_f1},
          {"pooled_confusion", confusion_json(report.pooled)},
          {"per_class", classes},
          {"warnings", report.warnings},
          {"spec", report.spec}};
}

MetricsReport report_from_json(const nlohmann::json& doc) {
  try {
    MetricsReport r;
    r.mode = parse_cv_mode(doc.at("cv_mode").get<std::string>());
    r.k = doc.at("folds_k").get<int>();
    r.seed = doc.at("fold_seed").get<std::uint64_t>();
    for (const auto& f : doc.at("folds")) {
      FoldResult fr;
      fr.fold = f.at("fold").get<int>();
      fr.train_rows = f.at("train_rows").get<std::size_t>();
      fr.test_rows = f.at("test_rows").get<std::size_t>();
      fr.weighted_f1 = f.at("weighted_f1").get<double>();
      fr.confusion = confusion_from(f.at("confusion"));
      fr.seizure_weighted_f1 = f.at("seizure_weighted_f1").get<double>();
      fr.seizure_confusion = confusion_from(f.at("seizure_confusion"));
      r.folds.push_back(fr);
    }
    r.mean_weighted_f1 = doc.at("mean_weighted_f1").get<double>();
    r.mean_seizure_weighted_f1 = doc.at("mean_seizure_weighted_f1").get<double>();
    r.pooled = confusion_from(doc.at("pooled_confusion"));
    r.per_class = class_metrics(r.pooled);
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    r.spec = doc.at("spec");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics JSON: ") + e.what());
  }
}

}  // namespace szt
