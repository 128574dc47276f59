#pragma once
// Runtime-dispatched compute kernels. Two implementations of the same table:
// a scalar reference (always available) and an AVX2+FMA variant selected at
// startup when the CPU supports it. All kernels are written so both variants
// produce bit-identical results:
//   - per-lane maps (Box-Muller, blocked path stepping) share one templated
//     implementation instantiated at pack width 1 and 4;
//   - reductions (dot, offset sums) use a fixed 4-accumulator pattern in both
//     variants, so the summation order never depends on the instruction set.

#include <cstddef>

namespace disdrift::kern {

// Flattened problem view consumed by the blocked steppers. All pointers refer
// to storage owned by the caller (see StepProgramStorage in analysis).
struct StepProgram {
  // Piecewise-polynomial drift: m breakpoints, m+1 pieces (ascending
  // coefficients, zero-padded to a common length).
  int m = 0;
  const double* zeta = nullptr;    // [m]
  const double* bval = nullptr;    // [m] drift value at each breakpoint
  const double* pieces = nullptr;  // [(m+1) * piece_len]
  int piece_len = 0;

  // Diffusion catalog entry: 0 constant, 1 affine, 2 polynomial, 3 sine
  // (s0 + s1*sin(s2*x)), 4 tanh (s0 + s1*tanh(s2*x)).
  int sigma_kind = 0;
  double s0 = 0, s1 = 0, s2 = 0;
  const double* sigma_coeffs = nullptr;   // polynomial only, ascending
  const double* sigma_dcoeffs = nullptr;  // its derivative, ascending
  int sigma_len = 0;

  // Transform bumps (same breakpoints as the drift); ignored when
  // `transformed` is false.
  bool transformed = false;
  const double* alpha = nullptr;  // [m]
  const double* csup = nullptr;   // [m] support radii

  bool use_milstein = false;
  bool track_min_dist = false;  // record min over nodes of dist(x, breakpoints)
};

struct KernelTable {
  const char* name;  // "scalar" or "avx2"
  int width;

  // Box-Muller: consumes u[2i], u[2i+1] and writes z[2i] = r cos, z[2i+1] =
  // r sin with r = sqrt(-2 ln u[2i]), angle 2*pi*u[2i+1].
  void (*normals_from_uniforms)(const double* u, double* z, std::size_t n_pairs);

  // Dot product with the fixed 4-accumulator reduction.
  double (*dot)(const double* a, const double* b, std::size_t n);

  // sum_{i=0}^{n-d-1} dc_i * (dc_i + 2 ds_i) with dc_i = c[i] - c[i+d],
  // ds_i = s[i] - s[i+d]; the seminorm quadrature inner loop.
  double (*offset_cross_sum)(const double* c, const double* s, std::size_t n,
                             std::size_t d);

  // Steps `width` paths in lockstep over a uniform grid. `inc` is interleaved
  // [step][lane]; x0, out_terminal, out_min_dist are [lane] (min_dist may be
  // null unless the program tracks it). Returns false when the transform
  // inversion fails to converge (numerical failure).
  bool (*run_fixed_block)(const StepProgram& prog, const double* inc,
                          std::size_t n_steps, double dt, const double* x0,
                          double* out_terminal, double* out_min_dist);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();    // null when the CPU lacks AVX2/FMA
const KernelTable& active_table();  // avx2 when available, unless forced off

// Testing / CLI escape hatch; affects subsequent active_table() calls.
void force_scalar_kernels(bool on);
bool scalar_kernels_forced();

}  // namespace disdrift::kern
