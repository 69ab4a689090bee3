#include <cmath>

#include "szt/errors.hpp"
#include "szt/featurize.hpp"

namespace szt {

ColumnStats standardize_fit(const RealMatrix& train) {
  if (train.rows() == 0) throw DataError("standardize_fit: empty training matrix");
  const std::size_t d = train.cols();
  const auto n = static_cast<double>(train.rows());
  ColumnStats s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> scale(d, 0.0);
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = row[c] - s.mean[c];
      s.stddev[c] += dv * dv;
      scale[c] = std::max(scale[c], std::abs(row[c]));
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    s.stddev[c] = std::sqrt(s.stddev[c] / n);
    if (s.stddev[c] <= 1e-13 * scale[c]) s.stddev[c] = 0.0;
  }
  return s;
}

RealMatrix standardize_apply(const ColumnStats& stats, const RealMatrix& x) {
  if (x.cols() != stats.mean.size()) throw DimensionError("standardize_apply: column count mismatch");
  RealMatrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto src = x.row(r);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      dst[c] = stats.stddev[c] == 0.0 ? 0.0 : (src[c] - stats.mean[c]) / stats.stddev[c];
    }
  }
  return out;
}

}  // namespace szt
