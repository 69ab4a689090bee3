#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "szt/errors.hpp"
#include "szt/kernels.hpp"
#include "szt/numerics.hpp"

namespace szt {
namespace {

using cplx = std::complex<double>;

// exp(-2 pi i num / den) with the angle reduced exactly in integers first.
cplx unit_root(std::uint64_t num, std::uint64_t den) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(num % den) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

std::span<const double> as_reals(std::span<const cplx> v) {
  return {reinterpret_cast<const double*>(v.data()), v.size() * 2};
}
std::span<double> as_reals(std::span<cplx> v) {
  return {reinterpret_cast<double*>(v.data()), v.size() * 2};
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw DataError("FftPlan: zero length");
  const bool pow2 = std::has_single_bit(n);
  m_ = pow2 ? n : std::bit_ceil(2 * n - 1);

  twiddles_.resize(m_ / 2);
  for (std::size_t k = 0; k < m_ / 2; ++k) twiddles_[k] = unit_root(k, m_);

  bit_reverse_.resize(m_);
  const int bits = std::countr_zero(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
    bit_reverse_[i] = r;
  }

  if (!pow2) {
    // chirp_t = exp(-pi i t^2 / n); t^2 reduced mod 2n keeps the angle exact.
    chirp_.resize(n_);
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n_);
    for (std::size_t t = 0; t < n_; ++t) {
      const std::uint64_t sq = (static_cast<std::uint64_t>(t) * t) % two_n;
      chirp_[t] = unit_root(sq, two_n);
    }
    chirp_fft_.assign(m_, cplx{});
    chirp_fft_[0] = std::conj(chirp_[0]);
    for (std::size_t t = 1; t < n_; ++t) {
      chirp_fft_[t] = std::conj(chirp_[t]);
      chirp_fft_[m_ - t] = std::conj(chirp_[t]);
    }
    radix2(chirp_fft_, false);
  }
}

void FftPlan::radix2(std::span<cplx> data, bool inverse) const {
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= m_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = m_ / len;
    for (std::size_t start = 0; start < m_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx w = inverse ? std::conj(twiddles_[k * step]) : twiddles_[k * step];
        const cplx u = data[start + k];
        const cplx v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

void FftPlan::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw DimensionError("FftPlan::forward: length mismatch");
  if (chirp_.empty()) {
    radix2(data, false);
    return;
  }
  std::vector<cplx> work(m_, cplx{});
  kernels::complex_multiply(as_reals(std::span<const cplx>(data)), as_reals(std::span<const cplx>(chirp_)),
                            as_reals(std::span<cplx>(work.data(), n_)));
  radix2(work, false);
  kernels::complex_multiply(as_reals(std::span<const cplx>(work)), as_reals(std::span<const cplx>(chirp_fft_)),
                            as_reals(std::span<cplx>(work)));
  radix2(work, true);
  const double scale = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < n_; ++k) data[k] = work[k] * chirp_[k] * scale;
}

std::vector<double> FftPlan::magnitudes(std::span<const double> samples) const {
  if (samples.size() != n_) throw DimensionError("FftPlan::magnitudes: length mismatch");
  std::vector<cplx> buf(samples.begin(), samples.end());
  forward(buf);
  std::vector<double> out(n_ / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(buf[k]);
  return out;
}

Spectrum fft_magnitude(std::span<const double> samples, double fs) {
  if (samples.empty()) throw DataError("fft_magnitude: empty input");
  if (samples.size() < 2) throw DataError("fft_magnitude: need at least 2 samples");
  if (!(fs > 0.0) || !std::isfinite(fs)) throw NumericError("fft_magnitude: sampling rate must be > 0");
  for (double v : samples) {
    if (!std::isfinite(v)) throw NumericError("fft_magnitude: non-finite sample");
  }
  const FftPlan plan(samples.size());
  Spectrum s;
  s.magnitudes = plan.magnitudes(samples);
  s.resolution = fs / static_cast<double>(samples.size());
  s.frequencies.resize(s.magnitudes.size());
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) s.frequencies[k] = static_cast<double>(k) * s.resolution;
  return s;
}

}  // namespace szt
