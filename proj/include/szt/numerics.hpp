#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace szt {

// Row-major dense matrix of finite doubles.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws NumericError if any entry is NaN/Inf or the size does not match.
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  bool operator==(const RealMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Spectrum {
  std::vector<double> frequencies;  // Hz, ascending
  std::vector<double> magnitudes;   // |X_k|, k = 0..n/2
  double resolution = 0.0;          // fs / n
};

// Reusable transform for one length. Power-of-two lengths use an iterative
// radix-2 transform; other lengths go through Bluestein's chirp-z identity.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  // Forward DFT X_k = sum_t x_t exp(-2 pi i k t / n); data.size() == size().
  void forward(std::span<std::complex<double>> data) const;
  // One-sided magnitudes |X_k| for k = 0..n/2 of a real input.
  std::vector<double> magnitudes(std::span<const double> samples) const;

 private:
  void radix2(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::size_t m_;  // radix-2 working length (n_ itself when n_ is a power of two)
  std::vector<std::complex<double>> twiddles_;  // length m_/2
  std::vector<std::size_t> bit_reverse_;
  std::vector<std::complex<double>> chirp_;     // length n_, Bluestein only
  std::vector<std::complex<double>> chirp_fft_; // length m_, Bluestein only
};

// Throws DataError on empty/short input, NumericError on non-finite samples or fs <= 0.
Spectrum fft_magnitude(std::span<const double> samples, double fs);

// Pearson correlation between rows. Zero-variance rows get a zero row/column
// and a unit diagonal entry.
RealMatrix pearson_correlation(const RealMatrix& x);

struct EigenOptions {
  double tolerance = 1e-10;  // off-diagonal Frobenius norm, relative to max(1, ||A||_F)
  int max_sweeps = 64;
  double symmetry_tolerance = 1e-9;
};

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, in
// diagonal order (unsorted). Inputs whose asymmetry exceeds the tolerance are
// rejected with NumericError; non-convergence throws ConvergenceError.
std::vector<double> sym_eigenvalues(const RealMatrix& a, const EigenOptions& options = {});

// Linear interpolation onto a new rate; length round(n * fs_out / fs_in),
// sample i taken at time i / fs_out, clamped past the last input sample.
std::vector<double> resample_linear(std::span<const double> samples, double fs_in, double fs_out);

}  // namespace szt
