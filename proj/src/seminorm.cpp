#include <cmath>
#include <cstddef>
#include <vector>

#include "disdrift/analysis.hpp"
#include "disdrift/kernels/kernels.hpp"

namespace disdrift {

namespace {

// Double antiderivative of the kernel u^(-1-2k): integrating twice gives
// A(u) = u^(1-2k) / (2k (1-2k)), so the kernel integral over a rectangle
// x in [x0,x1], y in [y0,y1] (y > x) is
//   A(y1-x1) + A(y0-x0) - A(y1-x0) - A(y0-x1).
double kernel_box_integral(double u, double kappa) {
  return std::pow(u, 1.0 - 2.0 * kappa) / (2.0 * kappa * (1.0 - 2.0 * kappa));
}

}  // namespace

SeminormResult sobolev_seminorm(const PiecewiseDrift& base,
                                const SmoothCoefficient* subtract, double kappa,
                                double radius, int resolution) {
  if (!(kappa > 0.0) || !(kappa < 1.0))
    throw ConfigError("smoothness exponent must lie in (0, 1)");
  if (!(radius > 0.0)) throw ConfigError("domain radius must be positive");
  if (resolution < 16) throw ConfigError("quadrature resolution must be at least 16");
  const double R = radius;
  const auto n = static_cast<std::size_t>(resolution);

  const std::size_t m = base.breakpoint_count();
  const std::vector<double>& zetas = base.breakpoints();
  for (double z : zetas)
    if (!(z > -R) || !(z < R))
      throw ConfigError("drift breakpoints must lie inside the domain radius");

  auto b = [&](double x) {
    double v = base(x);
    if (subtract) v -= (*subtract)(x);
    return v;
  };

  // The seminorm only sees differences of b, so the constant offset is
  // removed before checking that b has settled by the domain edge.
  const double bl = b(-R), br = b(R);
  const double mid = 0.5 * (bl + br);
  if (std::abs(bl - mid) > 1e-8 || std::abs(br - mid) > 1e-8)
    throw ConfigError(
        "b must settle to a constant inside the domain radius: |b(+-R) - midrange| "
        "exceeds 1e-8");

  // Split b = s + c: s collects the jumps (the smooth subtrahend cancels in
  // the one-sided limit difference), c is the continuous remainder.
  std::vector<double> jumps(m);
  bool any_jump = false;
  for (std::size_t k = 0; k < m; ++k) {
    const auto [left, right] = base.one_sided_limits(k);
    jumps[k] = right - left;
    if (jumps[k] != 0.0) any_jump = true;
  }
  if (any_jump && kappa >= 0.5)
    throw NumericalError(
        "the seminorm diverges: b has a jump and the exponent is at least 1/2");

  // Jump self-interaction in closed form over the whole box, including the
  // diagonal band where the kernel is too singular for midpoint quadrature.
  // The (i, j) pair integrates the kernel over straddling pairs: x left of
  // both breakpoints, y right of both (doubled for the mirrored region).
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (jumps[i] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (jumps[j] == 0.0) continue;
      const double zl = std::min(zetas[i], zetas[j]);
      const double zr = std::max(zetas[i], zetas[j]);
      const double box = kernel_box_integral(R - zl, kappa) +
                         kernel_box_integral(zr + R, kappa) -
                         kernel_box_integral(2.0 * R, kappa) -
                         kernel_box_integral(zr - zl, kappa);
      total += 2.0 * jumps[i] * jumps[j] * box;
    }
  }

  // Midpoint quadrature for the continuous and cross terms, grouped by the
  // node offset d (all pairs at distance d*h share one kernel weight).
  const double h = 2.0 * R / static_cast<double>(n);
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -R + (static_cast<double>(i) + 0.5) * h;
    double step = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (x > zetas[k])
        step += 0.5 * jumps[k];
      else if (x < zetas[k])
        step -= 0.5 * jumps[k];
    }
    s[i] = step;
    c[i] = b(x) - step;
  }
  const auto& table = kern::active_table();
  for (std::size_t d = 1; d < n; ++d) {
    const double g = table.offset_cross_sum(c.data(), s.data(), n, d);
    total += 2.0 * g * std::pow(static_cast<double>(d) * h, -2.0 * kappa - 1.0) * h * h;
  }

  SeminormResult result;
  result.kappa = kappa;
  result.value = std::sqrt(std::max(total, 0.0));
  result.resolution = resolution;
  result.radius = radius;
  return result;
}

}  // namespace disdrift
