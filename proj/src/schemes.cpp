#include "disdrift/schemes.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "disdrift/kernels/step_core.hpp"
#include "program_build.hpp"

namespace disdrift {

using kern::Pack1;

namespace {

void require_grid_match(const TimeGrid& grid, const NoisePath& noise) {
  if (grid.nodes != noise.grid.nodes)
    throw ConfigError("noise path grid does not match the scheme grid");
}

void require_no_jump(const SdeProblem& problem, const char* scheme) {
  if (problem.jump_rate > 0)
    throw ConfigError(std::string(scheme) +
                      " does not handle a jump component; use the jump scheme");
}

// Shared fixed-grid driver: EM / Milstein, optionally through the transform.
Trajectory run_fixed(const SdeProblem& problem, const TimeGrid& grid,
                     const NoisePath& noise, const TransformG* g, bool use_milstein) {
  require_grid_match(grid, noise);
  auto storage = build_step_program(problem, g, use_milstein, false);
  const auto prog = storage.view();
  bool transformed = prog.transformed;

  Trajectory traj;
  traj.times = grid.nodes;
  traj.values.resize(grid.nodes.size());
  traj.values[0] = problem.initial;

  Pack1 state{problem.initial};
  if (transformed) state = kern::apply_transform(prog, state);
  for (std::size_t k = 0; k + 1 < grid.nodes.size(); ++k) {
    Pack1 dt{grid.nodes[k + 1] - grid.nodes[k]};
    Pack1 dw{noise.increments[k]};
    if (transformed) {
      if (!kern::fixed_step_transformed(prog, state, dt, dw))
        throw NumericalError("transform inversion did not converge during stepping");
      Pack1 x;
      if (!kern::invert_transform(prog, state, x))
        throw NumericalError("transform inversion did not converge during stepping");
      traj.values[k + 1] = x.v;
    } else {
      state = kern::fixed_step_plain(prog, state, dt, dw);
      traj.values[k + 1] = state.v;
    }
  }
  return traj;
}

}  // namespace

Trajectory euler_maruyama(const SdeProblem& problem, const TimeGrid& grid,
                          const NoisePath& noise) {
  require_no_jump(problem, "euler_maruyama");
  return run_fixed(problem, grid, noise, nullptr, false);
}

Trajectory milstein(const SdeProblem& problem, const TimeGrid& grid,
                    const NoisePath& noise) {
  require_no_jump(problem, "milstein");
  return run_fixed(problem, grid, noise, nullptr, true);
}

Trajectory transform_method(const SdeProblem& problem, const TimeGrid& grid,
                            const NoisePath& noise, const TransformG& g) {
  require_no_jump(problem, "transform_method");
  if (!problem.non_degenerate_at_breakpoints())
    throw ConfigError(
        "transform scheme requires nonzero diffusion at every drift breakpoint");
  return run_fixed(problem, grid, noise, &g, false);
}

Trajectory transformed_milstein(const SdeProblem& problem, const TimeGrid& grid,
                                const NoisePath& noise, const TransformG& g) {
  require_no_jump(problem, "transformed_milstein");
  if (!problem.non_degenerate_at_breakpoints())
    throw ConfigError(
        "transform scheme requires nonzero diffusion at every drift breakpoint");
  return run_fixed(problem, grid, noise, &g, true);
}

double step_size_h(double x, double delta, const std::vector<double>& breakpoints,
                   double eps0) {
  double dist = std::numeric_limits<double>::infinity();
  for (double z : breakpoints) dist = std::min(dist, std::fabs(x - z));
  double scaled = dist / eps0;
  return std::max(delta * delta, std::min(delta, scaled * scaled));
}

Trajectory adaptive_euler_maruyama(const SdeProblem& problem, const StepPolicy& policy,
                                   BrownianSource& noise_source) {
  require_no_jump(problem, "adaptive_euler_maruyama");
  if (policy.mode != StepPolicy::Mode::Adaptive)
    throw ConfigError("adaptive_euler_maruyama requires an adaptive step policy");
  if (!(policy.delta > 0 && policy.delta < 1))
    throw ConfigError("adaptive step policy requires delta in (0, 1)");
  if (!(policy.eps0 > 0)) throw ConfigError("adaptive scale eps0 must be positive");

  auto storage = build_step_program(problem, nullptr, false, false);
  const auto prog = storage.view();
  const auto& breakpoints = problem.drift.breakpoints();
  const double T = problem.horizon;

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.values.push_back(problem.initial);
  double tau = 0.0;
  Pack1 x{problem.initial};
  while (tau < T) {
    double h = step_size_h(x.v, policy.delta, breakpoints, policy.eps0);
    if (h < 1e-14)
      throw NumericalError("adaptive step size underflow (degenerate configuration)");
    // The final step is truncated to land exactly on T.
    double tau_next = (T - tau <= h) ? T : tau + h;
    double dw = noise_source.increment(tau, tau_next);
    x = kern::fixed_step_plain(prog, x, Pack1{tau_next - tau}, Pack1{dw});
    traj.times.push_back(tau_next);
    traj.values.push_back(x.v);
    tau = tau_next;
  }
  return traj;
}

Trajectory jump_euler_maruyama(const SdeProblem& problem, const TimeGrid& grid,
                               const NoisePath& noise, const JumpTrain& jumps) {
  require_grid_match(grid, noise);
  if (!(problem.jump_rate > 0) || !problem.jump.has_value())
    throw ConfigError("jump_euler_maruyama requires a jump coefficient and positive rate");

  // Every event time must be a grid node (events are merged into the grid,
  // never binned into a step).
  {
    std::size_t j = 0;
    for (double t : jumps.event_times) {
      while (j < grid.nodes.size() && grid.nodes[j] < t) ++j;
      if (j == grid.nodes.size() || grid.nodes[j] != t)
        throw ConfigError("jump event time missing from the scheme grid");
    }
  }

  auto storage = build_step_program(problem, nullptr, false, false);
  const auto prog = storage.view();
  const SmoothCoefficient& rho = *problem.jump;

  Trajectory traj;
  traj.times = grid.nodes;
  traj.values.resize(grid.nodes.size());
  traj.values[0] = problem.initial;
  Pack1 x{problem.initial};
  std::size_t next_event = 0;
  for (std::size_t k = 0; k + 1 < grid.nodes.size(); ++k) {
    double t_next = grid.nodes[k + 1];
    x = kern::fixed_step_plain(prog, x, Pack1{t_next - grid.nodes[k]},
                               Pack1{noise.increments[k]});
    if (next_event < jumps.event_times.size() && jumps.event_times[next_event] == t_next) {
      x = Pack1{x.v + rho(x.v)};  // add rho(X_{t-}) once at the event
      ++next_event;
    }
    traj.values[k + 1] = x.v;
  }
  return traj;
}

}  // namespace disdrift
