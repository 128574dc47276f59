#pragma once
// Internal helper: flattens an SdeProblem (+ optional transform) into the
// pointer-based StepProgram consumed by the compute kernels. The storage
// object owns the flattened arrays and must outlive every view() user.

#include <vector>

#include "disdrift/kernels/kernels.hpp"
#include "disdrift/sde_core.hpp"
#include "disdrift/transform.hpp"

namespace disdrift {

struct StepProgramStorage {
  std::vector<double> zeta, bval, pieces, sigma_coeffs, sigma_dcoeffs, alpha, csup;
  int m = 0, piece_len = 0, sigma_kind = 0, sigma_len = 0;
  double s0 = 0, s1 = 0, s2 = 0;
  bool transformed = false, use_milstein = false, track_min_dist = false;

  kern::StepProgram view() const {
    kern::StepProgram p;
    p.m = m;
    p.zeta = zeta.data();
    p.bval = bval.data();
    p.pieces = pieces.data();
    p.piece_len = piece_len;
    p.sigma_kind = sigma_kind;
    p.s0 = s0;
    p.s1 = s1;
    p.s2 = s2;
    p.sigma_coeffs = sigma_coeffs.data();
    p.sigma_dcoeffs = sigma_dcoeffs.data();
    p.sigma_len = sigma_len;
    p.transformed = transformed;
    p.alpha = alpha.data();
    p.csup = csup.data();
    p.use_milstein = use_milstein;
    p.track_min_dist = track_min_dist;
    return p;
  }
};

// `g` may be null (plain schemes). When given, its breakpoints must equal the
// drift's (build_transform guarantees this).
StepProgramStorage build_step_program(const SdeProblem& problem, const TransformG* g,
                                      bool use_milstein, bool track_min_dist);

}  // namespace disdrift
