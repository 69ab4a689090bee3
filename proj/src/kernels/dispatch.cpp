#include <atomic>
#include <cstdlib>
#include <string>

#include "szt/errors.hpp"
#include "szt/kernels.hpp"

namespace szt::kernels {

#ifndef SZT_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  if (const char* env = std::getenv("SZT_ISA"); env != nullptr && std::string(env) == "scalar") {
    return &scalar_table();
  }
  if (avx2_table() != nullptr && cpu_has_avx2_fma()) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{select_default()};
  return current;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return avx2_table() != nullptr && cpu_has_avx2_fma();
  }
  return false;
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw UsageError("kernel ISA not available: " + std::string(isa_name(isa)));
  }
  slot().store(isa == Isa::Avx2 ? avx2_table() : &scalar_table());
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace szt::kernels
