#pragma once
// The removal-of-discontinuity transform G. Around each drift breakpoint a
// compactly supported cubic bump is added to the identity:
//
//   G(x) = x + sum_k alpha_k * phi_k(x - zeta_k),
//   phi(u) = u*|u|*(1 - |u|/c)^3 on |u| <= c, zero outside.
//
// The slope alpha_k = (mu(zeta_k-) - mu(zeta_k+)) / (2 sigma(zeta_k)^2) is
// chosen so that the Ito drift of Z = G(X) has matching one-sided limits at
// the image of each breakpoint: phi''(0+-) = +-2, so the G'' term injects a
// jump that exactly cancels the drift's own jump.

#include <memory>
#include <vector>

#include "disdrift/sde_core.hpp"

namespace disdrift {

struct StepProgramStorage;  // internal flattened view for the compute kernels

class TransformG {
 public:
  // Identity transform (m = 0).
  TransformG() = default;
  TransformG(std::vector<double> breakpoints, std::vector<double> alphas,
             std::vector<double> supports);

  double apply(double x) const;  // G(x)
  // (G'(x), G''(x)); at a breakpoint G'' uses the right-hand value.
  std::pair<double, double> derivatives(double x) const;
  // Both one-sided G'' values at x (they differ only at breakpoints).
  std::pair<double, double> second_derivative_limits(double x) const;
  double invert(double z) const;  // G^{-1}, bracketed Newton + bisection

  bool is_identity() const { return breakpoints_.empty(); }
  std::size_t breakpoint_count() const { return breakpoints_.size(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& supports() const { return supports_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> alphas_;
  std::vector<double> supports_;
};

// Builds G for the given drift/diffusion pair:
//   alpha_k = (mu(zeta_k-) - mu(zeta_k+)) / (2 sigma(zeta_k)^2)
//   c_k     = min(gap_k / 2, 1 / (2|alpha_k| + 1))
// where gap_k is the distance to the nearest neighboring breakpoint. The
// c_k bound keeps G' >= 1 - |alpha_k| * max|phi'| > 0.9 on every support.
// Throws ConfigError when sigma vanishes at a breakpoint.
TransformG build_transform(const PiecewiseDrift& drift, const SmoothCoefficient& diffusion);

// Coefficients of the Z-equation dZ = mu~(Z) dt + sigma~(Z) dW obtained from
// Ito's formula, evaluated in x-coordinates at x = G^{-1}(z):
//   mu~(z)    = G'(x) mu(x) + (1/2) G''(x) sigma(x)^2
//   sigma~(z) = G'(x) sigma(x)
// One-sided values at breakpoints use the right-hand convention.
class TransformedProblem {
 public:
  TransformedProblem(TransformG g, SdeProblem problem);

  double drift(double z) const;
  double diffusion(double z) const;
  // sigma~(z) * sigma~'(z) = sigma(x) * (G''(x) sigma(x) + G'(x) sigma'(x));
  // the Milstein correction coefficient of the Z-equation.
  double milstein_coefficient(double z) const;

  double initial() const { return initial_; }
  double horizon() const { return problem_.horizon; }
  const TransformG& transform() const { return g_; }
  const SdeProblem& base_problem() const { return problem_; }

  // One-sided limits of mu~ at the image of breakpoint k (left, right).
  std::pair<double, double> drift_limits_at_image(std::size_t k) const;

 private:
  TransformG g_;
  SdeProblem problem_;
  double initial_;
  std::shared_ptr<const StepProgramStorage> storage_;
};

// Builds the transformed problem and verifies the defining property: mu~ is
// continuous at every image point G(zeta_k) within 1e-8. A violation means
// alpha was constructed inconsistently and raises NumericalError.
TransformedProblem transformed_coefficients(const TransformG& g, const SdeProblem& problem);

}  // namespace disdrift
