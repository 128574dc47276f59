#pragma once
// Approximation schemes as pure steppers: (problem, grid/policy, noise) ->
// discrete trajectory. Fixed-grid schemes consume a NoisePath on the same
// grid; the adaptive scheme consumes Brownian increments on demand; the jump
// scheme additionally consumes a JumpTrain whose event times must be grid
// nodes.

#include <vector>

#include "disdrift/noise.hpp"
#include "disdrift/sde_core.hpp"
#include "disdrift/transform.hpp"

namespace disdrift {

struct Trajectory {
  std::vector<double> times;   // strictly increasing, 0 to T
  std::vector<double> values;  // approximate states, same length
  std::size_t step_count() const { return times.size() - 1; }
  double terminal() const { return values.back(); }
};

struct StepPolicy {
  enum class Mode { Fixed, Adaptive };
  double delta = 0.0;   // maximal step size
  Mode mode = Mode::Fixed;
  double eps0 = 1.0;    // adaptive distance scale
};

// X_{k+1} = X_k + mu(X_k) dt_k + sigma(X_k) dW_k, X_0 = xi.
Trajectory euler_maruyama(const SdeProblem& problem, const TimeGrid& grid,
                          const NoisePath& noise);

// EM plus (1/2) sigma sigma' ((dW)^2 - dt).
Trajectory milstein(const SdeProblem& problem, const TimeGrid& grid,
                    const NoisePath& noise);

// Adaptive step size: max(delta^2, min(delta, (dist(x, breakpoints)/eps0)^2)).
// dist over an empty breakpoint set is +inf, so h = delta. Not clipped to the
// horizon here; the driver truncates the final step to land exactly on T.
double step_size_h(double x, double delta, const std::vector<double>& breakpoints,
                   double eps0);

// EM with state-dependent steps tau_{k+1} = tau_k + h(X_k, delta), increments
// served on demand. Throws NumericalError if a step underflows below 1e-14.
Trajectory adaptive_euler_maruyama(const SdeProblem& problem, const StepPolicy& policy,
                                   BrownianSource& noise_source);

// EM per grid interval; at every jump event time t (which must be a grid
// node) adds rho(X_{t-}) once after the diffusion update of the interval
// ending at t.
Trajectory jump_euler_maruyama(const SdeProblem& problem, const TimeGrid& grid,
                               const NoisePath& noise, const JumpTrain& jumps);

// EM applied to the Z-equation of Z = G(X) from Z_0 = G(xi), mapped back
// through G^{-1} at every node.
Trajectory transform_method(const SdeProblem& problem, const TimeGrid& grid,
                            const NoisePath& noise, const TransformG& g);

// Milstein applied to the Z-equation, mapped back through G^{-1}.
Trajectory transformed_milstein(const SdeProblem& problem, const TimeGrid& grid,
                                const NoisePath& noise, const TransformG& g);

}  // namespace disdrift
