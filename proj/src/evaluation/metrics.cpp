#include "szt/errors.hpp"
#include "szt/evaluation.hpp"

namespace szt {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (auto v : row) t += v;
  }
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int i = 0; i < kNumClasses; ++i) {
    for (int j = 0; j < kNumClasses; ++j) counts[i][j] += other.counts[i][j];
  }
  return *this;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("confusion: length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

std::array<ClassMetrics, kNumClasses> class_metrics(const ConfusionMatrix& cm) {
  std::array<ClassMetrics, kNumClasses> out{};
  for (int c = 0; c < kNumClasses; ++c) {
    std::uint64_t predicted = 0;
    std::uint64_t actual = 0;
    for (int j = 0; j < kNumClasses; ++j) {
      predicted += cm.counts[j][c];
      actual += cm.counts[c][j];
    }
    const auto tp = static_cast<double>(cm.counts[c][c]);
    ClassMetrics& m = out[c];
    m.support = actual;
    m.precision = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = actual > 0 ? tp / static_cast<double>(actual) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  return out;
}

double weighted_f1(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw DataError("weighted_f1: empty confusion matrix");
  const auto metrics = class_metrics(cm);
  double acc = 0.0;
  for (const auto& m : metrics) acc += static_cast<double>(m.support) * m.f1;
  return acc / static_cast<double>(total);
}

}  // namespace szt
