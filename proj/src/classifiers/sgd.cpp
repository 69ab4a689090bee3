#include <algorithm>
#include <cmath>
#include <numeric>

#include "szt/classifiers.hpp"
#include "szt/errors.hpp"
#include "szt/kernels.hpp"
#include "szt/rng.hpp"

namespace szt {
namespace {

void logits(const RealMatrix& w, std::span<const double> bias, std::span<const double> x,
            std::span<double> out) {
  for (int c = 0; c < kNumClasses; ++c) out[c] = kernels::dot(w.row(c), x) + bias[c];
}

}  // namespace

LinearObjective linear_objective(const RealMatrix& weights, std::span<const double> bias, const Dataset& data,
                                 double alpha) {
  data.validate();
  if (weights.rows() != kNumClasses || weights.cols() != data.dim()) {
    throw DimensionError("linear_objective: weight shape mismatch");
  }
  LinearObjective out;
  out.grad_weights = RealMatrix(kNumClasses, data.dim());
  const auto n = static_cast<double>(data.rows());
  std::array<double, kNumClasses> p{};
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.x.row(i);
    logits(weights, bias, x, p);
    softmax_inplace(p);
    out.loss -= std::log(std::max(p[data.y[i]], 1e-300)) / n;
    for (int c = 0; c < kNumClasses; ++c) {
      const double r = (p[c] - (c == data.y[i] ? 1.0 : 0.0)) / n;
      kernels::axpy(r, x, out.grad_weights.row(c));
      out.grad_bias[c] += r;
    }
  }
  double sq = 0.0;
  for (double v : weights.values()) sq += v * v;
  out.loss += 0.5 * alpha * sq;
  kernels::axpy(alpha, weights.values(), out.grad_weights.values());
  return out;
}

LinearModel sgd_fit(const Dataset& data, const SgdConfig& config, std::uint64_t seed) {
  data.validate();
  if (data.rows() == 0) throw DataError("sgd_fit: empty training set");
  if (config.epochs < 1) throw UsageError("sgd_fit: epochs must be >= 1");
  if (config.alpha < 0.0) throw UsageError("sgd_fit: alpha must be >= 0");
  if (!(config.lr0 > 0.0)) throw UsageError("sgd_fit: lr0 must be > 0");

  LinearModel model;
  model.config = config;
  model.seed = seed;
  model.weights = RealMatrix(kNumClasses, data.dim());
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::array<double, kNumClasses> p{};
  std::uint64_t t = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      ++t;
      const double lr = config.schedule == LrSchedule::Constant
                            ? config.lr0
                            : config.lr0 / (1.0 + config.lr0 * config.alpha * static_cast<double>(t));
      const auto x = data.x.row(idx);
      logits(model.weights, model.bias, x, p);
      softmax_inplace(p);
      // L2 step applied multiplicatively; clamped so huge alpha cannot flip signs.
      const double decay = std::max(0.0, 1.0 - lr * config.alpha);
      if (decay != 1.0) {
        for (double& w : model.weights.values()) w *= decay;
      }
      for (int c = 0; c < kNumClasses; ++c) {
        const double r = p[c] - (c == data.y[idx] ? 1.0 : 0.0);
        kernels::axpy(-lr * r, x, model.weights.row(c));
        model.bias[c] -= lr * r;
      }
    }
    const LinearObjective obj = linear_objective(model.weights, model.bias, data, config.alpha);
    bool finite = std::isfinite(obj.loss);
    for (double v : model.weights.values()) finite = finite && std::isfinite(v);
    if (!finite) throw DivergenceError("sgd_fit: objective diverged at epoch " + std::to_string(epoch), epoch);
    model.epoch_loss.push_back(obj.loss);
  }
  return model;
}

RealMatrix sgd_probabilities(const LinearModel& model, const RealMatrix& x) {
  if (x.rows() > 0 && x.cols() != model.weights.cols()) throw DimensionError("sgd_predict: feature width mismatch");
  RealMatrix out(x.rows(), kNumClasses);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    logits(model.weights, model.bias, x.row(i), out.row(i));
    softmax_inplace(out.row(i));
  }
  return out;
}

std::vector<int> sgd_predict(const LinearModel& model, const RealMatrix& x) {
  if (x.rows() > 0 && x.cols() != model.weights.cols()) throw DimensionError("sgd_predict: feature width mismatch");
  std::vector<int> out(x.rows());
  std::array<double, kNumClasses> z{};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    logits(model.weights, model.bias, x.row(i), z);
    out[i] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

}  // namespace szt
