#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "szt/numerics.hpp"
#include "szt/seizure_type.hpp"

namespace szt {

struct Dataset {
  RealMatrix x;
  std::vector<int> y;  // class ids in [0, kNumClasses)

  std::size_t rows() const { return x.rows(); }
  std::size_t dim() const { return x.cols(); }
  void validate() const;
};

// ---- k-NN -----------------------------------------------------------------

enum class Vote { Uniform, InverseDistance };

struct KnnConfig {
  int k = 5;
  Vote vote = Vote::Uniform;
};

struct KnnModel {
  KnnConfig config;
  RealMatrix x;
  std::vector<int> y;
};

KnnModel knn_fit(const Dataset& data, const KnnConfig& config);
// Euclidean neighbours. Vote ties go to the tied class owning the nearest
// neighbour; equal-distance ties among those fall to the lowest class id.
std::vector<int> knn_predict(const KnnModel& model, const RealMatrix& x, int workers = 1);

// ---- SGD multinomial logistic regression ----------------------------------

enum class LrSchedule { Constant, InverseScaling };

struct SgdConfig {
  double alpha = 1e-4;  // L2 strength
  double lr0 = 0.01;
  LrSchedule schedule = LrSchedule::InverseScaling;
  int epochs = 20;
};

struct LinearModel {
  SgdConfig config;
  std::uint64_t seed = 0;
  RealMatrix weights;  // kNumClasses x D
  std::array<double, kNumClasses> bias{};
  std::vector<double> epoch_loss;
};

// Per-sample steps over a seeded shuffle each epoch. Throws DivergenceError
// when the objective becomes non-finite.
LinearModel sgd_fit(const Dataset& data, const SgdConfig& config, std::uint64_t seed);
std::vector<int> sgd_predict(const LinearModel& model, const RealMatrix& x);
RealMatrix sgd_probabilities(const LinearModel& model, const RealMatrix& x);

struct LinearObjective {
  double loss = 0.0;
  RealMatrix grad_weights;
  std::array<double, kNumClasses> grad_bias{};
};

// Mean cross-entropy + (alpha/2)||W||^2 and its full-batch gradient.
LinearObjective linear_objective(const RealMatrix& weights, std::span<const double> bias, const Dataset& data,
                                 double alpha);

// ---- gradient-boosted trees -----------------------------------------------

struct GbtConfig {
  int rounds = 100;
  int max_depth = 3;
  double eta = 0.1;
  int min_leaf = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> x) const;
};

struct GbtModel {
  GbtConfig config;
  std::size_t dim = 0;
  std::array<double, kNumClasses> prior{};  // log class frequencies
  std::vector<std::array<RegressionTree, kNumClasses>> rounds;
  std::vector<double> train_loss;  // mean log-loss after each round
};

// Softmax boosting with exact greedy variance-reduction splits.
GbtModel gbt_fit(const Dataset& data, const GbtConfig& config, std::uint64_t seed);
std::vector<int> gbt_predict(const GbtModel& model, const RealMatrix& x);
RealMatrix gbt_probabilities(const GbtModel& model, const RealMatrix& x);

// ---- uniform facade ---------------------------------------------------------

enum class ClassifierKind { Knn, Sgd, Gbt };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

using ModelConfig = std::variant<KnnConfig, SgdConfig, GbtConfig>;
using Model = std::variant<KnnModel, LinearModel, GbtModel>;

ClassifierKind kind_of(const ModelConfig& config);
ClassifierKind kind_of(const Model& model);
std::size_t model_dim(const Model& model);

Model fit_model(const ModelConfig& config, const Dataset& data, std::uint64_t seed, int workers = 1);
// Throws DimensionError when x's width differs from the training width.
std::vector<int> predict_labels(const Model& model, const RealMatrix& x, int workers = 1);

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(ClassifierKind kind, const nlohmann::json& params);
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);

// Row-wise softmax in place; numerically stable.
void softmax_inplace(std::span<double> logits);

}  // namespace szt
