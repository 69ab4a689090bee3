#include <cmath>
#include <sstream>

#include "szt/errors.hpp"
#include "szt/numerics.hpp"

namespace szt {
namespace {

double off_diagonal_norm(const RealMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<double> sym_eigenvalues(const RealMatrix& input, const EigenOptions& options) {
  const std::size_t n = input.rows();
  if (n != input.cols()) throw DimensionError("sym_eigenvalues: matrix is not square");
  if (n == 0) return {};

  double frob = 0.0;
  double max_abs = 0.0;
  for (double v : input.values()) {
    frob += v * v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  frob = std::sqrt(frob);

  RealMatrix a(n, n);
  const double sym_limit = options.symmetry_tolerance * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(input(i, j) - input(j, i));
      if (d > sym_limit) {
        std::ostringstream msg;
        msg << "sym_eigenvalues: asymmetry " << d << " at (" << i << "," << j << ") exceeds tolerance";
        throw NumericError(msg.str());
      }
      a(i, j) = 0.5 * (input(i, j) + input(j, i));
    }
  }

  const double target = options.tolerance * std::max(1.0, frob);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that zeroes a(p,q); t is the smaller root of
        // t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  const double residual = off_diagonal_norm(a);
  if (residual > target) {
    std::ostringstream msg;
    msg << "sym_eigenvalues: no convergence after " << options.max_sweeps
        << " sweeps (off-diagonal norm " << residual << ")";
    throw ConvergenceError(msg.str(), residual);
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  return eig;
}

}  // namespace szt
