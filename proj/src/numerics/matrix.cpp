#include <cmath>
#include <string>

#include "szt/errors.hpp"
#include "szt/numerics.hpp"

namespace szt {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw NumericError("RealMatrix: non-finite fill value");
}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("RealMatrix: " + std::to_string(data_.size()) + " values for " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw NumericError("RealMatrix: non-finite entry");
  }
}

}  // namespace szt
