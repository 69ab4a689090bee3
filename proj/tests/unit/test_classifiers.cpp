#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "szt/classifiers.hpp"
#include "szt/errors.hpp"
#include "szt/log.hpp"

using namespace szt;

namespace {

Dataset make(std::vector<std::vector<double>> rows, std::vector<int> y) {
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return {RealMatrix(rows.size(), d, flat), std::move(y)};
}

RealMatrix points(std::vector<std::vector<double>> rows) { return make(std::move(rows), {}).x; }

Dataset blobs(std::uint64_t seed, std::size_t n, int classes, double spread) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Dataset d{RealMatrix(n, 3), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    d.x(i, 0) = 4.0 * std::cos(c) + noise(gen);
    d.x(i, 1) = 4.0 * std::sin(c) + noise(gen);
    d.x(i, 2) = noise(gen);
    d.y.push_back(c);
  }
  return d;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

class QuietLog : public ::testing::Test {
 protected:
  void SetUp() override { log::set_quiet(true); }
  void TearDown() override { log::set_quiet(false); }
};

}  // namespace

// ---- k-NN ----------------------------------------------------------------------------

TEST(Knn, ExactMatchWithKOne) {
  const Dataset d = make({{0, 0}, {1, 1}, {2, 2}}, {3, 5, 1});
  const auto m = knn_fit(d, {1, Vote::Uniform});
  EXPECT_EQ(knn_predict(m, points({{1, 1}})), std::vector<int>{5});
}

TEST(Knn, MajorityOfThree) {
  const Dataset d = make({{0, 0}, {1, 0}, {10, 0}}, {0, 0, 1});
  EXPECT_EQ(knn_predict(knn_fit(d, {3, Vote::Uniform}), points({{0.4, 0}})), std::vector<int>{0});
}

TEST(Knn, VoteTieGoesToNearestNeighbour) {
  const Dataset d = make({{0, 0}, {1, 0}}, {4, 2});
  const auto m = knn_fit(d, {2, Vote::Uniform});
  EXPECT_EQ(knn_predict(m, points({{0.3, 0}})), std::vector<int>{4});
  EXPECT_EQ(knn_predict(m, points({{0.7, 0}})), std::vector<int>{2});
  // Equidistant: falls to the lowest class id, every time.
  for (int rep = 0; rep < 5; ++rep) EXPECT_EQ(knn_predict(m, points({{0.5, 0}})), std::vector<int>{2});
}

TEST(Knn, InverseDistanceWeighting) {
  const Dataset d = make({{0, 0}, {3, 0}, {3.2, 0}}, {0, 1, 1});
  const auto q = points({{0.5, 0}});
  EXPECT_EQ(knn_predict(knn_fit(d, {3, Vote::Uniform}), q), std::vector<int>{1});
  EXPECT_EQ(knn_predict(knn_fit(d, {3, Vote::InverseDistance}), q), std::vector<int>{0});
  // An exact match wins outright under inverse-distance voting.
  EXPECT_EQ(knn_predict(knn_fit(d, {3, Vote::InverseDistance}), points({{3, 0}})), std::vector<int>{1});
}

TEST(Knn, FullNeighbourhoodPredictsGlobalMajority) {
  const Dataset d = blobs(3, 40, 3, 0.5);
  Dataset skewed = d;
  skewed.y[0] = skewed.y[3] = skewed.y[6] = 1;
  const auto m = knn_fit(skewed, {static_cast<int>(skewed.rows()), Vote::Uniform});
  for (int c : knn_predict(m, d.x)) EXPECT_EQ(c, 1);
}

TEST(Knn, ParallelPredictionMatchesSerial) {
  const Dataset d = blobs(4, 200, 7, 2.0);
  const auto m = knn_fit(d, {5, Vote::InverseDistance});
  EXPECT_EQ(knn_predict(m, d.x, 1), knn_predict(m, d.x, 3));
}

TEST(Knn, Errors) {
  EXPECT_THROW(knn_fit(Dataset{}, {1, Vote::Uniform}), DataError);
  const Dataset d = make({{0, 0}, {1, 0}}, {0, 1});
  EXPECT_THROW(knn_fit(d, {3, Vote::Uniform}), UsageError);
  EXPECT_THROW(knn_predict(knn_fit(d, {1, Vote::Uniform}), points({{1, 2, 3}})), DimensionError);
  EXPECT_THROW(knn_fit(make({{0}}, {7}), {1, Vote::Uniform}), DataError);
}

// ---- SGD -------------------------------------------------------------------------------

TEST(Sgd, SeparableBlobsReachPerfectTrainingAccuracy) {
  const Dataset d = blobs(5, 200, 2, 0.3);
  const auto m = sgd_fit(d, {1e-4, 0.1, LrSchedule::Constant, 50}, 1);
  EXPECT_EQ(accuracy(sgd_predict(m, d.x), d.y), 1.0);
}

TEST(Sgd, HugeRegularizationShrinksWeights) {
  const Dataset d = blobs(6, 100, 3, 0.5);
  const auto m = sgd_fit(d, {1e6, 0.01, LrSchedule::InverseScaling, 10}, 2);
  double sq = 0;
  for (double v : m.weights.values()) sq += v * v;
  EXPECT_LT(std::sqrt(sq), 1e-2);
}

TEST(Sgd, DeterministicForFixedSeed) {
  const Dataset d = blobs(7, 120, 4, 1.0);
  const SgdConfig cfg{1e-3, 0.05, LrSchedule::InverseScaling, 5};
  const auto a = sgd_fit(d, cfg, 9), b = sgd_fit(d, cfg, 9), c = sgd_fit(d, cfg, 10);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_NE(a.weights, c.weights);
}

TEST(Sgd, AnalyticGradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(8);
  const Dataset d{RealMatrix(5, 4, oracle::random_vector(gen, 20, -2, 2)), {0, 3, 6, 3, 1}};
  const double alpha = 0.05;
  for (int point = 0; point < 20; ++point) {
    RealMatrix w(kNumClasses, 4, oracle::random_vector(gen, kNumClasses * 4, -1, 1));
    std::vector<double> b = oracle::random_vector(gen, kNumClasses, -1, 1);
    const LinearObjective obj = linear_objective(w, b, d, alpha);
    const double h = 1e-6;
    auto check = [&](double analytic, double plus, double minus) {
      const double numeric = (plus - minus) / (2 * h);
      const double rel = std::fabs(analytic - numeric) / std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
      EXPECT_LE(rel, 1e-5) << "analytic " << analytic << " numeric " << numeric;
    };
    for (std::size_t i = 0; i < w.values().size(); ++i) {
      RealMatrix wp = w, wm = w;
      wp.values()[i] += h;
      wm.values()[i] -= h;
      check(obj.grad_weights.values()[i], linear_objective(wp, b, d, alpha).loss,
            linear_objective(wm, b, d, alpha).loss);
    }
    for (int c = 0; c < kNumClasses; ++c) {
      auto bp = b, bm = b;
      bp[c] += h;
      bm[c] -= h;
      check(obj.grad_bias[c], linear_objective(w, bp, d, alpha).loss, linear_objective(w, bm, d, alpha).loss);
    }
  }
}

TEST(Sgd, ProbabilitiesSumToOne) {
  const Dataset d = blobs(9, 70, 7, 1.0);
  const auto m = sgd_fit(d, {}, 3);
  const RealMatrix p = sgd_probabilities(m, d.x);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    double s = 0;
    for (double v : p.row(r)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Sgd, DivergenceNamesTheEpoch) {
  const Dataset d = make({{1e200, -1e200}, {-1e200, 1e200}}, {0, 1});
  try {
    sgd_fit(d, {0.0, 1.0, LrSchedule::Constant, 3}, 1);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1);
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos);
  }
}

// ---- GBT -------------------------------------------------------------------------------

class Gbt : public QuietLog {};

TEST_F(Gbt, PriorOnlyModelPredictsMajority) {
  const Dataset d = make({{0}, {1}, {2}, {3}, {4}}, {2, 2, 5, 2, 1});
  const auto m = gbt_fit(d, {1, 0, 0.1, 1}, 0);
  for (int c : gbt_predict(m, points({{-5}, {2}, {100}}))) EXPECT_EQ(c, 2);
}

TEST_F(Gbt, XorIsLearned) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(-1, 1);
  Dataset d{RealMatrix(200, 2), {}};
  for (std::size_t i = 0; i < 200; ++i) {
    d.x(i, 0) = u(gen);
    d.x(i, 1) = u(gen);
    d.y.push_back((d.x(i, 0) > 0) != (d.x(i, 1) > 0) ? 1 : 0);
  }
  const auto m = gbt_fit(d, {50, 2, 0.3, 1}, 0);
  EXPECT_GE(accuracy(gbt_predict(m, d.x), d.y), 0.95);
}

TEST_F(Gbt, TrainingLossNeverIncreases) {
  const Dataset d = blobs(11, 150, 5, 2.0);
  const auto m = gbt_fit(d, {40, 3, 0.3, 2}, 0);
  ASSERT_EQ(m.train_loss.size(), 40u);
  for (std::size_t i = 1; i < m.train_loss.size(); ++i) EXPECT_LE(m.train_loss[i], m.train_loss[i - 1] + 1e-12);
}

TEST_F(Gbt, ZeroLearningRateKeepsThePrior) {
  const Dataset d = blobs(12, 60, 3, 1.0);
  Dataset skew = d;
  skew.y[1] = 0;
  const auto m = gbt_fit(skew, {5, 3, 0.0, 1}, 0);
  const RealMatrix p = gbt_probabilities(m, d.x);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    EXPECT_NEAR(p(r, 0), 21.0 / 60.0, 1e-10);  // absent classes keep a 1e-12 floor
  }
  for (int c : gbt_predict(m, d.x)) EXPECT_EQ(c, 0);
}

TEST_F(Gbt, SingleClassTrainingSetIsConstant) {
  const Dataset d = make({{0}, {1}, {2}}, {4, 4, 4});
  const auto m = gbt_fit(d, {3, 2, 0.3, 1}, 0);
  for (int c : gbt_predict(m, points({{-1}, {10}}))) EXPECT_EQ(c, 4);
}

TEST_F(Gbt, TreesAreWellFormedAndDeterministic) {
  const Dataset d = blobs(13, 120, 7, 1.5);
  const GbtConfig cfg{10, 4, 0.2, 3};
  const auto a = gbt_fit(d, cfg, 1), b = gbt_fit(d, cfg, 1);
  EXPECT_EQ(model_to_json(a).dump(), model_to_json(b).dump());
  for (const auto& round : a.rounds) {
    for (const auto& tree : round) {
      for (const auto& node : tree.nodes) {
        if (node.feature < 0) {
          EXPECT_TRUE(std::isfinite(node.value));
        } else {
          EXPECT_LT(static_cast<std::size_t>(node.feature), d.dim());
          EXPECT_GT(node.left, 0);
          EXPECT_GT(node.right, 0);
        }
      }
    }
  }
  const RealMatrix p = gbt_probabilities(a, d.x);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    double s = 0;
    for (double v : p.row(r)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST_F(Gbt, MinLeafIsRespected) {
  const Dataset d = blobs(14, 90, 3, 1.0);
  const auto m = gbt_fit(d, {1, 6, 0.5, 10}, 0);
  // Every split leaves at least min_leaf rows per side, so a tree has at most rows/min_leaf leaves.
  for (const auto& tree : m.rounds[0]) {
    const auto leaves = std::count_if(tree.nodes.begin(), tree.nodes.end(), [](const TreeNode& n) { return n.feature < 0; });
    EXPECT_LE(leaves, 9);
  }
}

// ---- facade and serialization -----------------------------------------------------------

TEST(Facade, DispatchMatchesDirectCalls) {
  log::set_quiet(true);
  const Dataset d = blobs(15, 84, 7, 1.0);
  const KnnConfig kc{3, Vote::Uniform};
  const SgdConfig sc{1e-3, 0.05, LrSchedule::Constant, 3};
  const GbtConfig gc{5, 2, 0.3, 1};
  EXPECT_EQ(predict_labels(fit_model(kc, d, 4), d.x), knn_predict(knn_fit(d, kc), d.x));
  EXPECT_EQ(predict_labels(fit_model(sc, d, 4), d.x), sgd_predict(sgd_fit(d, sc, 4), d.x));
  EXPECT_EQ(predict_labels(fit_model(gc, d, 4), d.x), gbt_predict(gbt_fit(d, gc, 4), d.x));
  log::set_quiet(false);
}

TEST(Facade, EmptyInputAndWidthMismatch) {
  const Dataset d = blobs(16, 20, 2, 1.0);
  for (const ModelConfig& cfg : {ModelConfig{KnnConfig{}}, ModelConfig{SgdConfig{}}, ModelConfig{GbtConfig{3, 2, 0.1, 1}}}) {
    const Model m = fit_model(cfg, d, 0);
    EXPECT_TRUE(predict_labels(m, RealMatrix(0, 3)).empty());
    EXPECT_THROW(predict_labels(m, RealMatrix(2, 5)), DimensionError);
    EXPECT_EQ(model_dim(m), 3u);
  }
}

TEST(Facade, ModelJsonRoundTripPreservesPredictions) {
  const Dataset d = blobs(17, 70, 7, 1.5);
  for (const ModelConfig& cfg :
       {ModelConfig{KnnConfig{4, Vote::InverseDistance}}, ModelConfig{SgdConfig{}}, ModelConfig{GbtConfig{4, 3, 0.2, 2}}}) {
    const Model m = fit_model(cfg, d, 1);
    const nlohmann::json j = model_to_json(m);
    const Model back = model_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(kind_of(back), kind_of(m));
    EXPECT_EQ(predict_labels(back, d.x), predict_labels(m, d.x));
  }
}

TEST(Facade, ConfigJson) {
  EXPECT_EQ(config_to_json(GbtConfig{})["algorithm"], "gbt-exact");
  const auto sgd = std::get<SgdConfig>(config_from_json(ClassifierKind::Sgd, {{"alpha", 0.5}, {"schedule", "constant"}}));
  EXPECT_EQ(sgd.alpha, 0.5);
  EXPECT_EQ(sgd.schedule, LrSchedule::Constant);
  EXPECT_THROW(config_from_json(ClassifierKind::Knn, {{"kk", 3}}), UsageError);
  EXPECT_THROW(config_from_json(ClassifierKind::Knn, {{"k", "three"}}), UsageError);
  EXPECT_THROW(config_from_json(ClassifierKind::Knn, {{"vote", "loud"}}), UsageError);
  EXPECT_THROW(config_from_json(ClassifierKind::Gbt, {{"algorithm", "hist"}}), UsageError);
  EXPECT_THROW(parse_classifier_kind("cnn"), UsageError);
  for (auto k : {ClassifierKind::Knn, ClassifierKind::Sgd, ClassifierKind::Gbt}) {
    EXPECT_EQ(parse_classifier_kind(to_string(k)), k);
  }
}
