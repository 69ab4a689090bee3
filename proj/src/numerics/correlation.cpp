#include <algorithm>
#include <cmath>

#include "szt/errors.hpp"
#include "szt/kernels.hpp"
#include "szt/numerics.hpp"

namespace szt {

RealMatrix pearson_correlation(const RealMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t len = x.cols();
  if (len < 2) throw DimensionError("pearson_correlation: need at least 2 columns");

  // Two-pass: center each row, then normalise the dot products.
  RealMatrix centered = x;
  std::vector<double> norms(n, 0.0);
  std::vector<bool> degenerate(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = centered.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(len);
    double scale = 0.0;
    for (double& v : row) {
      scale = std::max(scale, std::abs(v));
      v -= mean;
    }
    const double ss = kernels::dot(row, row);
    norms[r] = std::sqrt(ss);
    // Rounding residue of a constant row is ~eps * |value| per element.
    degenerate[r] = norms[r] <= 1e-13 * scale * std::sqrt(static_cast<double>(len));
  }

  RealMatrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = 1.0;
    if (degenerate[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (degenerate[j]) continue;
      double r = kernels::dot(centered.row(i), centered.row(j)) / (norms[i] * norms[j]);
      r = std::clamp(r, -1.0, 1.0);
      out(i, j) = r;
      out(j, i) = r;
    }
  }
  return out;
}

}  // namespace szt
