#include <stdexcept>

#include "disdrift/cli.hpp"

namespace disdrift {

namespace {

SdeProblem make_problem(PiecewiseDrift drift, SmoothCoefficient diffusion,
                        std::optional<SmoothCoefficient> jump, double jump_rate,
                        double initial, double horizon) {
  SdeProblem p{std::move(drift), std::move(diffusion), std::move(jump), jump_rate,
               initial, horizon};
  p.validate();
  return p;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;

  // Geometric Brownian motion: closed-form benchmark for the order-1/2
  // behaviour of EM under globally Lipschitz coefficients.
  out.push_back({"gbm",
                 make_problem(PiecewiseDrift::smooth({0.0, 0.5}),
                              SmoothCoefficient::affine(0.0, 0.3), std::nullopt, 0.0,
                              1.0, 1.0),
                 std::nullopt,
                 "linear drift 0.5x and diffusion 0.3x; closed-form solution"});

  // Drift 0.5 - 2 sign(x) pushes toward the origin from both sides; the sine
  // diffusion keeps the noise multiplicative but bounded away from zero.
  out.push_back({"sign-mult",
                 make_problem(PiecewiseDrift({0.0}, {{2.5}, {-1.5}}, {0.5}),
                              SmoothCoefficient::sine(1.0, 0.2, 1.0), std::nullopt,
                              0.0, 1.0, 1.0),
                 std::nullopt,
                 "drift 0.5 - 2 sign(x) toward the origin, diffusion 1 + 0.2 sin(x)"});

  // Drift sign(x) pushes away from the origin under unit additive noise; the
  // empirical EM rate sits near 3/4 rather than 1/2.
  out.push_back({"sign-additive",
                 make_problem(PiecewiseDrift({0.0}, {{-1.0}, {1.0}}, {0.0}),
                              SmoothCoefficient::constant(1.0), std::nullopt, 0.0,
                              0.1, 1.0),
                 std::nullopt,
                 "drift sign(x) away from the origin, unit additive noise"});

  // Paired hitting-statistics variants: identical noise, mirrored drift.
  out.push_back({"sign-inward",
                 make_problem(PiecewiseDrift({0.0}, {{2.5}, {-1.5}}, {0.5}),
                              SmoothCoefficient::constant(1.0), std::nullopt, 0.0,
                              0.1, 1.0),
                 std::nullopt,
                 "inward drift 0.5 - 2 sign(x) with unit noise, for hitting statistics"});
  out.push_back({"sign-outward",
                 make_problem(PiecewiseDrift({0.0}, {{-2.5}, {1.5}}, {-0.5}),
                              SmoothCoefficient::constant(1.0), std::nullopt, 0.0,
                              0.1, 1.0),
                 std::nullopt,
                 "outward drift 2 sign(x) - 0.5 with unit noise, for hitting statistics"});

  // Deterministic decay: x(t) = xi - 1.5 t exactly, any scheme, any grid.
  out.push_back({"ode-only",
                 make_problem(PiecewiseDrift::smooth({-1.5}),
                              SmoothCoefficient::constant(0.0), std::nullopt, 0.0,
                              1.0, 1.0),
                 std::nullopt,
                 "deterministic decay mu = -1.5, zero diffusion; x(t) = xi - 1.5 t"});

  // dx = -sign(x) dt has no classical solution once x reaches 0; Euler
  // iterates chatter in a band of width 2*delta around the origin.
  out.push_back({"chattering-ode",
                 make_problem(PiecewiseDrift({0.0}, {{1.0}, {-1.0}}, {0.0}),
                              SmoothCoefficient::constant(0.0), std::nullopt, 0.0,
                              0.5, 1.0),
                 std::nullopt,
                 "dx = -sign(x) dt, zero noise; Euler chatters in a 2*delta band at 0"});

  // Mean-reverting linear drift with additive noise; closed-form solution.
  out.push_back({"ou",
                 make_problem(PiecewiseDrift::smooth({0.0, -1.0}),
                              SmoothCoefficient::constant(0.5), std::nullopt, 0.0,
                              1.0, 1.0),
                 std::nullopt,
                 "mean-reverting drift -x with additive noise 0.5; closed-form solution"});

  // Constant coefficients: every scheme reproduces the solution exactly.
  out.push_back({"constant",
                 make_problem(PiecewiseDrift::smooth({1.0}),
                              SmoothCoefficient::constant(1.0), std::nullopt, 0.0,
                              0.0, 1.0),
                 std::nullopt,
                 "constant drift and unit noise; exactly representable by every scheme"});

  // The sign-mult problem with constant-size jumps at unit rate.
  out.push_back({"sign-jump",
                 make_problem(PiecewiseDrift({0.0}, {{2.5}, {-1.5}}, {0.5}),
                              SmoothCoefficient::sine(1.0, 0.2, 1.0),
                              SmoothCoefficient::constant(0.5), 1.0, 1.0, 1.0),
                 std::nullopt,
                 "sign drift with sine diffusion plus jumps of size 0.5 at unit rate"});

  // Seminorm decomposition: measure b = sign(x) - tanh(x), the irregular
  // remainder after subtracting a smooth drift part.
  out.push_back({"sign-decomposition",
                 make_problem(PiecewiseDrift({0.0}, {{-1.0}, {1.0}}, {0.0}),
                              SmoothCoefficient::constant(1.0), std::nullopt, 0.0,
                              0.1, 1.0),
                 SmoothCoefficient::tanh_shape(0.0, 1.0, 1.0),
                 "drift sign(x); seminorm measures b = sign(x) - tanh(x)"});

  return out;
}

}  // namespace

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> presets = build_presets();
  return presets;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : all_presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace disdrift
