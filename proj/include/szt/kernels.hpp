#pragma once

// Data-parallel inner loops used by the numerics and classifier code.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2+FMA variant. The variant is chosen once at first use from CPUID;
// SZT_ISA=scalar in the environment forces the reference path. The two
// variants agree to within reassociation/FMA rounding (see kernels tests).

#include <cstddef>
#include <span>
#include <string_view>

namespace szt::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // Pointwise product of interleaved (re, im) arrays holding n complex values.
  void (*complex_multiply)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool isa_supported(Isa isa);
Isa active_isa();
// Throws UsageError if the ISA is unavailable on this build or CPU.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void complex_multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().complex_multiply(a.data(), b.data(), out.data(), a.size() / 2);
}

}  // namespace szt::kernels
