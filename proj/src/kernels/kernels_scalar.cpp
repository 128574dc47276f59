// Scalar reference kernels: the Pack1 instantiation of the shared templates.

#include "disdrift/kernels/step_core.hpp"

namespace disdrift::kern {

namespace {

void normals_scalar(const double* u, double* z, std::size_t n_pairs) {
  for (std::size_t p = 0; p < n_pairs; ++p) {
    Pack1 z0, z1;
    box_muller_pair(Pack1{u[2 * p]}, Pack1{u[2 * p + 1]}, z0, z1);
    z[2 * p] = z0.v;
    z[2 * p + 1] = z1.v;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  return dot_impl<Pack1>(a, b, n);
}

double offset_cross_sum_scalar(const double* c, const double* s, std::size_t n,
                               std::size_t d) {
  return offset_cross_sum_impl<Pack1>(c, s, n, d);
}

bool run_fixed_block_scalar(const StepProgram& prog, const double* inc,
                            std::size_t n_steps, double dt, const double* x0,
                            double* out_terminal, double* out_min_dist) {
  return run_fixed_block_impl<Pack1>(prog, inc, n_steps, dt, x0, out_terminal,
                                     out_min_dist);
}

const KernelTable kScalarTable = {
    "scalar", 1,           normals_scalar, dot_scalar, offset_cross_sum_scalar,
    run_fixed_block_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

}  // namespace disdrift::kern
