#include <algorithm>
#include <cmath>
#include <string>

#include "szt/errors.hpp"
#include "szt/featurize.hpp"

namespace szt {

void FeatureSpec::validate() const {
  if (method != FeatureMethod::LogSpectrum && method != FeatureMethod::SpectralCorrelation) {
    throw UsageError("feature method must be 1 or 2");
  }
  if (fmax_hz <= 1) throw UsageError("f_max must be > 1 Hz");
  if (!(log_floor > 0.0)) throw UsageError("log floor must be > 0");
}

BinRange frequency_bins(std::size_t window_samples, double fs, int fmax_hz) {
  if (window_samples < 2 || !(fs > 0.0)) throw DataError("frequency_bins: degenerate window");
  const double resolution = fs / static_cast<double>(window_samples);
  constexpr double kSlack = 1e-9;
  BinRange r;
  r.first = static_cast<std::size_t>(std::ceil(1.0 / resolution - kSlack));
  r.last = static_cast<std::size_t>(std::ceil(static_cast<double>(fmax_hz) / resolution - kSlack));
  const std::size_t available = window_samples / 2 + 1;
  if (r.last > available) {
    throw DataError("f_max " + std::to_string(fmax_hz) + " Hz exceeds the Nyquist limit of the " +
                    std::to_string(fs) + " Hz window");
  }
  if (r.last <= r.first) throw DataError("no frequency bins in [1, f_max) for this window");
  return r;
}

std::size_t feature_dimension(const FeatureSpec& spec, std::size_t channels, std::size_t window_samples, double fs) {
  if (spec.method == FeatureMethod::LogSpectrum) {
    return channels * frequency_bins(window_samples, fs, spec.fmax_hz).count();
  }
  return channels * (channels - 1) / 2 + channels;
}

namespace {

RealMatrix clipped_magnitudes(const RealMatrix& window, double fs, const FeatureSpec& spec) {
  const std::size_t n = window.rows();
  const std::size_t len = window.cols();
  const BinRange bins = frequency_bins(len, fs, spec.fmax_hz);
  const FftPlan plan(len);
  RealMatrix mags(n, bins.count());
  for (std::size_t c = 0; c < n; ++c) {
    const auto full = plan.magnitudes(window.row(c));
    std::copy(full.begin() + static_cast<std::ptrdiff_t>(bins.first),
              full.begin() + static_cast<std::ptrdiff_t>(bins.last), mags.row(c).begin());
  }
  return mags;
}

}  // namespace

std::vector<double> method1_features(const RealMatrix& window, double fs, const FeatureSpec& spec) {
  spec.validate();
  if (window.rows() == 0) throw DimensionError("method1_features: window has no channels");
  RealMatrix mags = clipped_magnitudes(window, fs, spec);
  std::vector<double> out(mags.values().begin(), mags.values().end());
  for (double& v : out) v = std::log10(std::max(v, spec.log_floor));
  return out;
}

std::vector<double> method2_features(const RealMatrix& window, double fs, const FeatureSpec& spec) {
  spec.validate();
  const std::size_t n = window.rows();
  if (n < 2) throw DimensionError("method2_features: need at least 2 channels");
  RealMatrix mags = clipped_magnitudes(window, fs, spec);
  const std::size_t buckets = mags.cols();

  // z-score every frequency bucket across channels.
  for (std::size_t b = 0; b < buckets; ++b) {
    double mean = 0.0;
    for (std::size_t c = 0; c < n; ++c) mean += mags(c, b);
    mean /= static_cast<double>(n);
    double var = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double d = mags(c, b) - mean;
      var += d * d;
      scale = std::max(scale, std::abs(mags(c, b)));
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    const bool constant = sd <= 1e-13 * scale;
    for (std::size_t c = 0; c < n; ++c) mags(c, b) = constant ? 0.0 : (mags(c, b) - mean) / sd;
  }

  const RealMatrix corr = pearson_correlation(mags);
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2 + n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(corr(i, j));
  }
  std::vector<double> eig = sym_eigenvalues(corr);
  std::sort(eig.begin(), eig.end(), [](double a, double b) {
    const double aa = std::abs(a), ab = std::abs(b);
    if (aa != ab) return aa > ab;
    return a > b;
  });
  out.insert(out.end(), eig.begin(), eig.end());
  return out;
}

std::vector<double> window_features(const RealMatrix& window, double fs, const FeatureSpec& spec) {
  return spec.method == FeatureMethod::LogSpectrum ? method1_features(window, fs, spec)
                                                   : method2_features(window, fs, spec);
}

}  // namespace szt
