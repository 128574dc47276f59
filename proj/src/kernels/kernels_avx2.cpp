// AVX2+FMA kernels: the Pack4 instantiation of the shared templates. This
// translation unit is compiled with -mavx2 -mfma; the dispatcher only hands
// out the table after a runtime CPU check.

#include "disdrift/kernels/step_core.hpp"

#if !defined(__AVX2__) || !defined(__FMA__)
#error "kernels_avx2.cpp must be compiled with -mavx2 -mfma"
#endif

namespace disdrift::kern {

namespace {

void normals_avx2(const double* u, double* z, std::size_t n_pairs) {
  std::size_t quads = n_pairs / 4;  // 4 pairs = 8 uniforms per iteration
  for (std::size_t q = 0; q < quads; ++q) {
    __m256d a = _mm256_loadu_pd(u + 8 * q);      // u0 u1 u2 u3
    __m256d b = _mm256_loadu_pd(u + 8 * q + 4);  // u4 u5 u6 u7
    // Lane l holds pair (first, second) for pairs (0, 2, 1, 3); the
    // permutation is undone on output, so the pairing matches the scalar
    // kernel exactly.
    Pack4 u1{_mm256_unpacklo_pd(a, b)};
    Pack4 u2{_mm256_unpackhi_pd(a, b)};
    Pack4 z0, z1;
    box_muller_pair(u1, u2, z0, z1);
    _mm256_storeu_pd(z + 8 * q, _mm256_unpacklo_pd(z0.v, z1.v));
    _mm256_storeu_pd(z + 8 * q + 4, _mm256_unpackhi_pd(z0.v, z1.v));
  }
  for (std::size_t p = quads * 4; p < n_pairs; ++p) {
    Pack1 z0, z1;
    box_muller_pair(Pack1{u[2 * p]}, Pack1{u[2 * p + 1]}, z0, z1);
    z[2 * p] = z0.v;
    z[2 * p + 1] = z1.v;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  return dot_impl<Pack4>(a, b, n);
}

double offset_cross_sum_avx2(const double* c, const double* s, std::size_t n,
                             std::size_t d) {
  return offset_cross_sum_impl<Pack4>(c, s, n, d);
}

bool run_fixed_block_avx2(const StepProgram& prog, const double* inc,
                          std::size_t n_steps, double dt, const double* x0,
                          double* out_terminal, double* out_min_dist) {
  return run_fixed_block_impl<Pack4>(prog, inc, n_steps, dt, x0, out_terminal,
                                     out_min_dist);
}

const KernelTable kAvx2Table = {"avx2", 4,
                                normals_avx2, dot_avx2, offset_cross_sum_avx2,
                                run_fixed_block_avx2};

}  // namespace

// Resolved by the dispatcher after its runtime CPU check.
const KernelTable* avx2_table_raw() { return &kAvx2Table; }

}  // namespace disdrift::kern
