#include <cmath>

#include "szt/errors.hpp"
#include "szt/numerics.hpp"

namespace szt {

std::vector<double> resample_linear(std::span<const double> samples, double fs_in, double fs_out) {
  if (samples.empty()) throw DataError("resample_linear: empty input");
  if (!(fs_in > 0.0) || !(fs_out > 0.0)) throw UsageError("resample_linear: rates must be > 0");
  if (fs_in == fs_out) return {samples.begin(), samples.end()};

  const std::size_t n = samples.size();
  const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fs_out / fs_in));
  std::vector<double> out(out_len);
  const double ratio = fs_in / fs_out;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto left = static_cast<std::size_t>(std::floor(pos));
    if (left + 1 >= n) {
      out[i] = samples[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(left);
    out[i] = samples[left] + frac * (samples[left + 1] - samples[left]);
  }
  return out;
}

}  // namespace szt
