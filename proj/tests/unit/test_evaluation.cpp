#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "szt/errors.hpp"
#include "szt/evaluation.hpp"
#include "szt/log.hpp"

using namespace szt;

namespace {

std::vector<SeizureEvent> roster(const std::vector<std::pair<SeizureType, std::vector<std::string>>>& spec,
                                 int seizures_per_patient = 1) {
  std::vector<SeizureEvent> out;
  for (const auto& [type, patients] : spec) {
    for (const auto& p : patients) {
      for (int s = 0; s < seizures_per_patient; ++s) {
        SeizureEvent e;
        e.patient_id = p;
        e.session_id = std::string(to_code(type)) + std::to_string(s);
        e.file_path = p + "_" + e.session_id + ".edf";
        e.start_s = 0;
        e.stop_s = 10;
        e.type = type;
        out.push_back(e);
      }
    }
  }
  return out;
}

std::vector<std::string> names(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<SeizureEvent> typed(std::initializer_list<std::pair<SeizureType, int>> counts) {
  std::vector<SeizureEvent> out;
  int id = 0;
  for (auto [t, n] : counts) {
    for (int i = 0; i < n; ++i, ++id) {
      out.push_back({"p" + std::to_string(id), "s", "f" + std::to_string(id), 0, 1, t});
    }
  }
  return out;
}

}  // namespace

// ---- seizure-wise ---------------------------------------------------------------------

TEST(SeizureWiseFolds, EvenDeal) {
  const auto ev = typed({{SeizureType::FNSZ, 10}});
  const auto f = seizure_wise_folds(ev, 5, 1);
  EXPECT_EQ(f.fold_sizes(), (std::vector<std::size_t>{2, 2, 2, 2, 2}));
}

TEST(SeizureWiseFolds, PerTypeSizesDifferByAtMostOne) {
  const auto ev = typed({{SeizureType::FNSZ, 7}, {SeizureType::GNSZ, 5}});
  const auto f = seizure_wise_folds(ev, 5, 3);
  std::map<SeizureType, std::vector<int>> per_type;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    auto& v = per_type[ev[i].type];
    v.resize(5);
    ++v[static_cast<std::size_t>(f.fold_of[i])];
  }
  for (int c : per_type[SeizureType::FNSZ]) EXPECT_TRUE(c == 1 || c == 2);
  for (int c : per_type[SeizureType::GNSZ]) EXPECT_EQ(c, 1);
}

TEST(SeizureWiseFolds, DeterministicAndSeedSensitive) {
  const auto ev = typed({{SeizureType::FNSZ, 30}, {SeizureType::ABSZ, 12}});
  EXPECT_EQ(seizure_wise_folds(ev, 5, 7).fold_of, seizure_wise_folds(ev, 5, 7).fold_of);
  EXPECT_NE(seizure_wise_folds(ev, 5, 7).fold_of, seizure_wise_folds(ev, 5, 8).fold_of);
}

TEST(SeizureWiseFolds, TooFewSeizuresNamesTheType) {
  const auto ev = typed({{SeizureType::FNSZ, 10}, {SeizureType::TNSZ, 3}});
  try {
    seizure_wise_folds(ev, 5, 0);
    FAIL();
  } catch (const FoldError& e) {
    EXPECT_NE(std::string(e.what()).find("TNSZ"), std::string::npos);
  }
}

// ---- patient-wise ------------------------------------------------------------------------

TEST(PatientWiseFolds, RoundRobinPerType) {
  const auto ev = roster({{SeizureType::GNSZ, names("b", 6)}, {SeizureType::FNSZ, names("a", 3)}}, 2);
  const auto f = patient_wise_folds(ev, 3, 4);
  ASSERT_EQ(f.type_order.size(), 2u);
  EXPECT_EQ(f.type_order[0], SeizureType::FNSZ);
  std::map<std::string, std::vector<int>> by_prefix;
  for (const auto& [p, fold] : f.patient_fold) {
    auto& v = by_prefix[p.substr(0, 1)];
    v.resize(3);
    ++v[static_cast<std::size_t>(fold)];
  }
  EXPECT_EQ(by_prefix["a"], (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(by_prefix["b"], (std::vector<int>{2, 2, 2}));
}

TEST(PatientWiseFolds, EarlierTypeFixesSharedPatient) {
  // ABSZ has fewer patients, so it is processed first and fixes p1's fold.
  auto ev = roster({{SeizureType::ABSZ, {"p1", "p2", "p3"}}, {SeizureType::FNSZ, {"p1", "q1", "q2", "q3", "q4"}}}, 2);
  const auto f = patient_wise_folds(ev, 3, 11);
  EXPECT_EQ(f.type_order.front(), SeizureType::ABSZ);
  std::set<int> p1_folds;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].patient_id == "p1") p1_folds.insert(f.fold_of[i]);
  }
  EXPECT_EQ(p1_folds.size(), 1u);
}

TEST(PatientWiseFolds, SkewedSevenTypeRoster) {
  const std::vector<std::pair<SeizureType, int>> counts = {
      {SeizureType::FNSZ, 150}, {SeizureType::GNSZ, 81}, {SeizureType::CPSZ, 41}, {SeizureType::ABSZ, 12},
      {SeizureType::TNSZ, 3},   {SeizureType::TCSZ, 14}, {SeizureType::SPSZ, 3}};
  std::vector<std::pair<SeizureType, std::vector<std::string>>> spec;
  for (auto [t, n] : counts) spec.push_back({t, names(std::string(to_code(t)), n)});
  const auto ev = roster(spec);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = patient_wise_folds(ev, 3, seed);
    EXPECT_EQ(f.type_order,
              (std::vector<SeizureType>{SeizureType::TNSZ, SeizureType::SPSZ, SeizureType::ABSZ, SeizureType::TCSZ,
                                        SeizureType::CPSZ, SeizureType::GNSZ, SeizureType::FNSZ}));
    std::map<SeizureType, std::set<int>> spans;
    for (std::size_t i = 0; i < ev.size(); ++i) spans[ev[i].type].insert(f.fold_of[i]);
    for (const auto& [t, folds] : spans) EXPECT_EQ(folds.size(), 3u) << to_code(t);
  }
}

TEST(PatientWiseFolds, InsufficientFreshPatientsNamesTheType) {
  const auto ev = roster({{SeizureType::ABSZ, {"p1", "p2", "p3"}}, {SeizureType::FNSZ, {"p1", "p2", "q1", "q2"}}});
  try {
    patient_wise_folds(ev, 3, 0);
    FAIL();
  } catch (const FoldError& e) {
    EXPECT_NE(std::string(e.what()).find("FNSZ"), std::string::npos);
  }
}

TEST(PatientWiseFolds, PartitionAndPurityOnRandomRosters) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<SeizureType, std::vector<std::string>>> spec;
    for (SeizureType t : kAllSeizureTypes) {
      const int n = 3 + static_cast<int>(gen() % 6);
      spec.push_back({t, names(std::string(to_code(t)), n)});
    }
    const auto ev = roster(spec, 1 + static_cast<int>(gen() % 3));
    const auto f = patient_wise_folds(ev, 3, gen());
    std::map<std::string, std::set<int>> folds_of;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      ASSERT_GE(f.fold_of[i], 0);
      ASSERT_LT(f.fold_of[i], 3);
      folds_of[ev[i].patient_id].insert(f.fold_of[i]);
    }
    for (const auto& [p, s] : folds_of) EXPECT_EQ(s.size(), 1u) << p;
  }
}

TEST(FoldBalance, ReportsAndBounds) {
  const auto ev = typed({{SeizureType::FNSZ, 23}, {SeizureType::GNSZ, 9}, {SeizureType::TCSZ, 6}});
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 1};
  const auto r = fold_balance_report(ev, 5, CvMode::SeizureWise, seeds);
  ASSERT_EQ(r.per_seed.size(), 4u);
  EXPECT_LE(r.max_deviation, 3u);
  EXPECT_EQ(r.per_seed[0].fold_counts, r.per_seed[3].fold_counts);
  std::size_t total = 0;
  for (auto c : r.per_seed[0].fold_counts) total += c;
  EXPECT_EQ(total, ev.size());
  const std::vector<std::uint64_t> one = {1};
  EXPECT_THROW(fold_balance_report(ev, 5, CvMode::SeizureWise, one), UsageError);
}

// ---- metrics --------------------------------------------------------------------------------

TEST(WeightedF1, WorkedExample) {
  const std::vector<int> truth = {0, 0, 0, 1, 1, 2}, pred = {0, 0, 1, 1, 2, 2};
  const auto cm = confusion(truth, pred);
  const auto per = class_metrics(cm);
  EXPECT_DOUBLE_EQ(per[0].f1, 0.8);
  EXPECT_DOUBLE_EQ(per[1].f1, 0.5);
  EXPECT_DOUBLE_EQ(per[2].f1, 2.0 / 3.0);
  const double expected = (3 * 0.8 + 2 * 0.5 + 1 * (2.0 / 3.0)) / 6.0;
  EXPECT_DOUBLE_EQ(weighted_f1(cm), expected);
  EXPECT_NEAR(weighted_f1(cm), 0.6778, 5e-5);
  EXPECT_NEAR(weighted_f1(cm), oracle::weighted_f1(truth, pred), 1e-15);
}

TEST(WeightedF1, EdgeCases) {
  EXPECT_DOUBLE_EQ(weighted_f1(confusion(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3})), 1.0);
  // Class 5 is predicted but never true: zero support, contributes nothing.
  const std::vector<int> t = {0, 0, 1}, p = {0, 5, 1};
  EXPECT_NEAR(weighted_f1(confusion(t, p)), (2 * (2.0 / 3.0) + 1.0) / 3.0, 1e-15);
  EXPECT_THROW(weighted_f1(ConfusionMatrix{}), DataError);
}

TEST(WeightedF1, DiagonalMatrixEqualsAccuracy) {
  ConfusionMatrix cm;
  for (int c = 0; c < kNumClasses; ++c) cm.counts[c][c] = static_cast<std::uint64_t>(c * 3 + 1);
  EXPECT_DOUBLE_EQ(weighted_f1(cm), 1.0);
}

TEST(WeightedF1, MatchesOracleOnRandomMatrices) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> truth, pred;
    const std::size_t n = 1 + gen() % 200;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(static_cast<int>(gen() % kNumClasses));
      pred.push_back(gen() % 3 == 0 ? truth.back() : static_cast<int>(gen() % kNumClasses));
    }
    EXPECT_NEAR(weighted_f1(confusion(truth, pred)), oracle::weighted_f1(truth, pred), 1e-12);
  }
}

// ---- run_cv -----------------------------------------------------------------------------------

namespace {

// Seven well separated classes, 3 patients each, 2 seizures per patient, 5 windows per seizure.
struct Toy {
  std::vector<SeizureEvent> events;
  FeatureMatrix fm;
};

Toy toy(double separation, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0, 1);
  Toy t;
  std::vector<double> values;
  for (int c = 0; c < kNumClasses; ++c) {
    for (int p = 0; p < 3; ++p) {
      for (int s = 0; s < 2; ++s) {
        const auto sid = static_cast<std::uint32_t>(t.events.size());
        const std::string pid = "c" + std::to_string(c) + "p" + std::to_string(p);
        t.events.push_back({pid, "s" + std::to_string(s), pid + std::to_string(s), 0, 5, static_cast<SeizureType>(c)});
        for (int w = 0; w < 5; ++w) {
          for (int d = 0; d < 4; ++d) values.push_back((d == c % 4 ? separation * (1 + c / 4) : 0.0) + noise(gen));
          t.fm.labels.push_back(static_cast<std::uint8_t>(c));
          t.fm.patients.push_back(pid);
          t.fm.seizure_ids.push_back(sid);
          t.fm.window_starts.push_back(w);
        }
      }
    }
  }
  t.fm.features = RealMatrix(t.fm.labels.size(), 4, values);
  return t;
}

}  // namespace

TEST(RunCv, SeparableDataScoresHigh) {
  const Toy t = toy(20.0, 1);
  const auto folds = patient_wise_folds(t.events, 3, 2);
  const auto r = run_cv(t.fm, KnnConfig{5, Vote::Uniform}, folds);
  EXPECT_GE(r.mean_weighted_f1, 0.95);
  EXPECT_EQ(r.folds.size(), 3u);
  EXPECT_EQ(r.pooled.total(), t.fm.rows());
  std::uint64_t support = 0;
  for (const auto& m : r.per_class) support += m.support;
  EXPECT_EQ(support, t.fm.rows());
}

TEST(RunCv, DeterministicAndSerializable) {
  const Toy t = toy(2.0, 3);
  const auto folds = seizure_wise_folds(t.events, 5, 4);
  CvOptions opts;
  opts.seed = 9;
  opts.spec = {{"note", "toy"}};
  const auto a = run_cv(t.fm, SgdConfig{}, folds, opts);
  const auto b = run_cv(t.fm, SgdConfig{}, folds, opts);
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(b).dump());
  const auto back = report_from_json(nlohmann::json::parse(report_to_json(a).dump()));
  EXPECT_EQ(report_to_json(back).dump(), report_to_json(a).dump());
  EXPECT_EQ(back.mean_weighted_f1, a.mean_weighted_f1);
}

TEST(RunCv, StandardizationSeesOnlyTrainingRows) {
  Toy t = toy(2.0, 5);
  const auto folds = seizure_wise_folds(t.events, 5, 6);
  std::map<int, ColumnStats> before, after;
  CvOptions opts;
  opts.on_standardize = [&](int f, const ColumnStats& s) { before[f] = s; };
  run_cv(t.fm, KnnConfig{}, folds, opts);
  // Perturb one row belonging to fold 0's test split.
  std::size_t row = 0;
  while (folds.fold_of[t.fm.seizure_ids[row]] != 0) ++row;
  for (double& v : t.fm.features.row(row)) v += 1000.0;
  opts.on_standardize = [&](int f, const ColumnStats& s) { after[f] = s; };
  run_cv(t.fm, KnnConfig{}, folds, opts);
  EXPECT_EQ(before[0].mean, after[0].mean);
  EXPECT_EQ(before[0].stddev, after[0].stddev);
  EXPECT_NE(before[1].mean, after[1].mean);
}

TEST(RunCv, ShuffledLabelsFallToChance) {
  Toy t = toy(20.0, 7);
  const auto folds = seizure_wise_folds(t.events, 5, 8);
  std::mt19937_64 gen(9);
  double sum = 0;
  for (int rep = 0; rep < 10; ++rep) {
    // Shuffle seizure labels (all windows of a seizure move together).
    std::vector<std::uint8_t> seizure_label;
    for (const auto& e : t.events) seizure_label.push_back(static_cast<std::uint8_t>(e.type));
    std::shuffle(seizure_label.begin(), seizure_label.end(), gen);
    FeatureMatrix fm = t.fm;
    for (std::size_t r = 0; r < fm.rows(); ++r) fm.labels[r] = seizure_label[fm.seizure_ids[r]];
    sum += run_cv(fm, KnnConfig{5, Vote::Uniform}, folds).mean_weighted_f1;
  }
  EXPECT_LT(sum / 10, 0.4);
}

TEST(RunCv, MissingTrainingClassWarnsAndEmptyFoldThrows) {
  log::set_quiet(true);
  Toy t = toy(5.0, 11);
  // Keep a single patient for ABSZ so patient-wise folds leave it untrained in its own fold.
  FoldAssignment folds = seizure_wise_folds(t.events, 3, 1);
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    if (t.events[i].type == SeizureType::ABSZ) folds.fold_of[i] = 0;
  }
  const auto r = run_cv(t.fm, KnnConfig{}, folds);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("ABSZ"), std::string::npos);

  FoldAssignment empty = folds;
  for (int& f : empty.fold_of) f = f == 2 ? 1 : f;
  EXPECT_THROW(run_cv(t.fm, KnnConfig{}, empty), FoldError);
  log::set_quiet(false);
}
