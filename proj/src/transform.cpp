#include "disdrift/transform.hpp"

#include <cmath>

#include "disdrift/kernels/step_core.hpp"
#include "program_build.hpp"

namespace disdrift {

using kern::Pack1;

StepProgramStorage build_step_program(const SdeProblem& problem, const TransformG* g,
                                      bool use_milstein, bool track_min_dist) {
  StepProgramStorage st;
  const auto& drift = problem.drift;
  st.m = static_cast<int>(drift.breakpoint_count());
  st.zeta = drift.breakpoints();
  st.bval = drift.breakpoint_values();

  st.piece_len = 1;
  for (const auto& p : drift.pieces())
    st.piece_len = std::max(st.piece_len, static_cast<int>(p.size()));
  for (const auto& p : drift.pieces()) {
    for (int i = 0; i < st.piece_len; ++i)
      st.pieces.push_back(i < static_cast<int>(p.size()) ? p[i] : 0.0);
  }

  const auto& sig = problem.diffusion;
  switch (sig.kind()) {
    case SmoothCoefficient::Kind::Constant:
      st.sigma_kind = 0;
      break;
    case SmoothCoefficient::Kind::Affine:
      st.sigma_kind = 1;
      break;
    case SmoothCoefficient::Kind::Polynomial:
      st.sigma_kind = 2;
      break;
    case SmoothCoefficient::Kind::Sine:
      st.sigma_kind = 3;
      break;
    case SmoothCoefficient::Kind::Tanh:
      st.sigma_kind = 4;
      break;
  }
  st.s0 = sig.c0();
  st.s1 = sig.c1();
  st.s2 = sig.c2();
  st.sigma_coeffs = sig.coeffs();
  st.sigma_len = static_cast<int>(st.sigma_coeffs.size());
  for (std::size_t i = 1; i < st.sigma_coeffs.size(); ++i)
    st.sigma_dcoeffs.push_back(st.sigma_coeffs[i] * static_cast<double>(i));
  if (st.sigma_dcoeffs.empty()) st.sigma_dcoeffs.push_back(0.0);

  if (g && !g->is_identity()) {
    if (g->breakpoints() != drift.breakpoints())
      throw ConfigError("transform breakpoints must match the drift breakpoints");
    st.transformed = true;
    st.alpha = g->alphas();
    st.csup = g->supports();
  } else {
    // invert/apply treat m bumps via these arrays even when unused
    st.alpha.assign(st.m, 0.0);
    st.csup.assign(st.m, 1.0);
  }
  st.use_milstein = use_milstein;
  st.track_min_dist = track_min_dist;
  return st;
}

// ---------------------------------------------------------------------------
// TransformG
// ---------------------------------------------------------------------------

TransformG::TransformG(std::vector<double> breakpoints, std::vector<double> alphas,
                       std::vector<double> supports)
    : breakpoints_(std::move(breakpoints)),
      alphas_(std::move(alphas)),
      supports_(std::move(supports)) {
  if (alphas_.size() != breakpoints_.size() || supports_.size() != breakpoints_.size())
    throw ConfigError("transform needs one slope and one support per breakpoint");
  for (double c : supports_)
    if (!(c > 0)) throw ConfigError("transform support radii must be positive");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k - 1] < breakpoints_[k]))
      throw ConfigError("transform breakpoints must be strictly increasing");
    // Supports are open intervals; touching endpoints are still disjoint.
    if (breakpoints_[k - 1] + supports_[k - 1] > breakpoints_[k] - supports_[k])
      throw ConfigError("transform supports overlap");
  }
}

namespace {

// Minimal program view over just the bump data (drift/diffusion fields unused
// by apply/invert/derivative kernels).
kern::StepProgram bumps_only(const TransformG& g) {
  kern::StepProgram p;
  p.m = static_cast<int>(g.breakpoint_count());
  p.zeta = g.breakpoints().data();
  p.alpha = g.alphas().data();
  p.csup = g.supports().data();
  p.transformed = true;
  return p;
}

}  // namespace

double TransformG::apply(double x) const {
  if (is_identity()) return x;
  return kern::apply_transform(bumps_only(*this), Pack1{x}).v;
}

std::pair<double, double> TransformG::derivatives(double x) const {
  if (is_identity()) return {1.0, 0.0};
  Pack1 gp, gpp;
  kern::transform_derivs(bumps_only(*this), Pack1{x}, gp, gpp);
  return {gp.v, gpp.v};
}

std::pair<double, double> TransformG::second_derivative_limits(double x) const {
  // phi'' magnitude: 2t^3 - 12 s t^2 + 6 s^2 t with s = |u|/c, t = 1 - s;
  // the sign flips across u = 0, which is the only point where the one-sided
  // values differ.
  double left = 0, right = 0;
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    double u = x - breakpoints_[k];
    double c = supports_[k];
    double au = std::fabs(u);
    if (au >= c) continue;
    double s = au / c;
    double t = 1 - s;
    double mag = 2 * t * t * t - 12 * s * t * t + 6 * s * s * t;
    if (u > 0) {
      left += alphas_[k] * mag;
      right += alphas_[k] * mag;
    } else if (u < 0) {
      left -= alphas_[k] * mag;
      right -= alphas_[k] * mag;
    } else {
      left -= alphas_[k] * mag;   // phi''(0-) = -2 alpha
      right += alphas_[k] * mag;  // phi''(0+) = +2 alpha
    }
  }
  return {left, right};
}

double TransformG::invert(double z) const {
  if (is_identity()) return z;
  Pack1 x;
  if (!kern::invert_transform(bumps_only(*this), Pack1{z}, x))
    throw NumericalError("transform inversion did not converge (monotonicity violated?)");
  return x.v;
}

TransformG build_transform(const PiecewiseDrift& drift, const SmoothCoefficient& diffusion) {
  std::size_t m = drift.breakpoint_count();
  std::vector<double> alphas(m), supports(m);
  for (std::size_t k = 0; k < m; ++k) {
    double zeta = drift.breakpoints()[k];
    double sig = diffusion(zeta);
    if (sig == 0.0)
      throw ConfigError(
          "transform construction requires nonzero diffusion at every drift "
          "breakpoint");
    auto [left, right] = drift.one_sided_limits(k);
    alphas[k] = (left - right) / (2 * sig * sig);
    double gap = std::numeric_limits<double>::infinity();
    if (k > 0) gap = std::min(gap, zeta - drift.breakpoints()[k - 1]);
    if (k + 1 < m) gap = std::min(gap, drift.breakpoints()[k + 1] - zeta);
    supports[k] = std::min(gap / 2, 1.0 / (2 * std::fabs(alphas[k]) + 1));
  }
  return TransformG(drift.breakpoints(), std::move(alphas), std::move(supports));
}

// ---------------------------------------------------------------------------
// TransformedProblem
// ---------------------------------------------------------------------------

TransformedProblem::TransformedProblem(TransformG g, SdeProblem problem)
    : g_(std::move(g)), problem_(std::move(problem)), initial_(g_.apply(problem_.initial)) {
  storage_ = std::make_shared<const StepProgramStorage>(
      build_step_program(problem_, &g_, false, false));
}

double TransformedProblem::drift(double z) const {
  const auto prog = storage_->view();
  Pack1 x;
  if (!kern::invert_transform(prog, Pack1{z}, x))
    throw NumericalError("transform inversion did not converge");
  Pack1 mu = kern::eval_drift_pack(prog, x);
  Pack1 s, sp;
  kern::eval_sigma_pair(prog, x, s, sp);
  Pack1 gp, gpp;
  kern::transform_derivs(prog, x, gp, gpp);
  return fmadd(Pack1{0.5} * gpp, s * s, gp * mu).v;
}

double TransformedProblem::diffusion(double z) const {
  const auto prog = storage_->view();
  Pack1 x;
  if (!kern::invert_transform(prog, Pack1{z}, x))
    throw NumericalError("transform inversion did not converge");
  Pack1 s, sp;
  kern::eval_sigma_pair(prog, x, s, sp);
  Pack1 gp, gpp;
  kern::transform_derivs(prog, x, gp, gpp);
  return (gp * s).v;
}

double TransformedProblem::milstein_coefficient(double z) const {
  const auto prog = storage_->view();
  Pack1 x;
  if (!kern::invert_transform(prog, Pack1{z}, x))
    throw NumericalError("transform inversion did not converge");
  Pack1 s, sp;
  kern::eval_sigma_pair(prog, x, s, sp);
  Pack1 gp, gpp;
  kern::transform_derivs(prog, x, gp, gpp);
  return (s * fmadd(gpp, s, gp * sp)).v;
}

std::pair<double, double> TransformedProblem::drift_limits_at_image(std::size_t k) const {
  // G(zeta) = zeta and G' = 1 there; the one-sided values of mu~ are
  //   mu(zeta -/+) + (1/2) G''(zeta -/+) sigma(zeta)^2.
  auto [mu_left, mu_right] = problem_.drift.one_sided_limits(k);
  double zeta = problem_.drift.breakpoints()[k];
  auto [gpp_left, gpp_right] = g_.second_derivative_limits(zeta);
  double s2 = problem_.diffusion(zeta);
  s2 *= s2;
  return {mu_left + 0.5 * gpp_left * s2, mu_right + 0.5 * gpp_right * s2};
}

TransformedProblem transformed_coefficients(const TransformG& g, const SdeProblem& problem) {
  TransformedProblem tp(g, problem);
  for (std::size_t k = 0; k < problem.drift.breakpoint_count(); ++k) {
    auto [left, right] = tp.drift_limits_at_image(k);
    if (std::fabs(left - right) > 1e-8)
      throw NumericalError(
          "transformed drift is discontinuous at a breakpoint image; the "
          "transform slope was constructed inconsistently");
  }
  return tp;
}

}  // namespace disdrift
