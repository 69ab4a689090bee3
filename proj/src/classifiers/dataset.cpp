#include <cmath>
#include <string>

#include "szt/classifiers.hpp"
#include "szt/errors.hpp"

namespace szt {

void Dataset::validate() const {
  if (y.size() != x.rows()) {
    throw DimensionError("dataset: " + std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " rows");
  }
  for (int label : y) {
    if (label < 0 || label >= kNumClasses) throw DataError("dataset: class id out of range: " + std::to_string(label));
  }
}

void softmax_inplace(std::span<double> logits) {
  double peak = logits[0];
  for (double v : logits) peak = std::max(peak, v);
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : logits) v /= total;
}

}  // namespace szt
