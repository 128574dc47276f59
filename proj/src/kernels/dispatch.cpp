// Runtime kernel selection: AVX2 when compiled in and supported by the CPU,
// scalar otherwise or when forced for testing.

#include <atomic>

#include "disdrift/kernels/kernels.hpp"

namespace disdrift::kern {

#ifdef DISDRIFT_HAVE_AVX2
const KernelTable* avx2_table_raw();
#endif

namespace {
std::atomic<bool> g_force_scalar{false};
}

const KernelTable* avx2_table() {
#ifdef DISDRIFT_HAVE_AVX2
  static const KernelTable* table =
      (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
          ? avx2_table_raw()
          : nullptr;
  return table;
#else
  return nullptr;
#endif
}

const KernelTable& active_table() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return scalar_table();
  const KernelTable* v = avx2_table();
  return v ? *v : scalar_table();
}

void force_scalar_kernels(bool on) {
  g_force_scalar.store(on, std::memory_order_relaxed);
}

bool scalar_kernels_forced() { return g_force_scalar.load(std::memory_order_relaxed); }

}  // namespace disdrift::kern
