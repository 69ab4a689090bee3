#include <cmath>

#include "szt/errors.hpp"
#include "szt/featurize.hpp"
#include "szt/log.hpp"

namespace szt {

void WindowSpec::validate() const {
  if (!(length_s > 0.0)) throw UsageError("window length must be > 0");
  if (overlap_s < 0.0 || !(overlap_s < length_s)) throw UsageError("overlap must satisfy 0 <= O < W_l");
}

std::size_t window_count(double duration_s, const WindowSpec& spec) {
  spec.validate();
  // Slack absorbs representation error in products like 0.75 * W_l.
  constexpr double kSlack = 1e-9;
  if (duration_s + kSlack < spec.length_s) return 0;
  return static_cast<std::size_t>(std::floor((duration_s - spec.length_s) / spec.stride() + kSlack)) + 1;
}

std::vector<Window> window_clip(const Recording& clip, const WindowSpec& spec) {
  spec.validate();
  const double duration = clip.duration();
  const std::size_t count = window_count(duration, spec);
  if (count == 0) {
    log::warn("clip_shorter_than_window", {{"duration_s", duration}, {"window_s", spec.length_s}});
    return {};
  }
  const auto len = static_cast<std::size_t>(std::llround(spec.length_s * clip.fs));
  const std::size_t n = clip.samples.rows();
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double start = static_cast<double>(i) * spec.stride();
    const auto first = static_cast<std::size_t>(std::llround(start * clip.fs));
    if (first + len > clip.samples.cols()) break;
    Window w{start, RealMatrix(n, len)};
    for (std::size_t c = 0; c < n; ++c) {
      const auto src = clip.samples.row(c).subspan(first, len);
      std::copy(src.begin(), src.end(), w.samples.row(c).begin());
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace szt
