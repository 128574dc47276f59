#pragma once
// Problem representations shared by every scheme: piecewise-polynomial drift
// with explicit breakpoints, a small catalog of smooth coefficients with
// symbolic derivatives, the SDE problem aggregate, and time grids.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace disdrift {

// Raised for invalid problem/config input: maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an algorithm fails numerically (non-convergence, underflow):
// maps to CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// SmoothCoefficient: closed-form evaluator catalog with exact derivatives.
// ---------------------------------------------------------------------------

class SmoothCoefficient {
 public:
  enum class Kind { Constant, Affine, Polynomial, Sine, Tanh };

  static SmoothCoefficient constant(double value);
  static SmoothCoefficient affine(double c0, double c1);           // c0 + c1*x
  static SmoothCoefficient polynomial(std::vector<double> ascending_coeffs);
  static SmoothCoefficient sine(double c0, double c1, double c2);  // c0 + c1*sin(c2*x)
  static SmoothCoefficient tanh_shape(double c0, double c1, double c2);  // c0 + c1*tanh(c2*x)

  double operator()(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  Kind kind() const { return kind_; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  // True when the coefficient is identically zero (degenerate diffusion).
  bool is_zero() const;
  // True when the value is independent of x.
  bool is_constant() const;

 private:
  SmoothCoefficient(Kind k, double c0, double c1, double c2, std::vector<double> cs)
      : kind_(k), c0_(c0), c1_(c1), c2_(c2), coeffs_(std::move(cs)) {}
  Kind kind_;
  double c0_ = 0, c1_ = 0, c2_ = 0;
  std::vector<double> coeffs_;
};

// ---------------------------------------------------------------------------
// PiecewiseDrift: polynomial pieces between strictly increasing breakpoints.
// ---------------------------------------------------------------------------

class PiecewiseDrift {
 public:
  // pieces.size() must equal breakpoints.size() + 1; piece k applies on the
  // open interval (zeta_{k-1}, zeta_k). values_at_breakpoints fixes the value
  // exactly at each breakpoint; if empty, the right limit is used.
  PiecewiseDrift(std::vector<double> breakpoints,
                 std::vector<std::vector<double>> pieces,
                 std::vector<double> values_at_breakpoints = {});

  // Single smooth polynomial (m = 0).
  static PiecewiseDrift smooth(std::vector<double> ascending_coeffs);

  double operator()(double x) const;           // eval_drift
  std::pair<double, double> one_sided_limits(std::size_t k) const;  // (left, right)
  double piece_derivative(double x) const;     // derivative of the active piece

  std::size_t breakpoint_count() const { return breakpoints_.size(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& pieces() const { return pieces_; }
  const std::vector<double>& breakpoint_values() const { return values_; }

  // Declared per-piece Lipschitz bound on the box [-box, box]; checkable by
  // dense sampling (see spot_check_lipschitz).
  double lipschitz_bound(double box_radius) const;
  bool spot_check_lipschitz(double box_radius, double declared_bound,
                            int samples = 4096) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> pieces_;  // ascending coefficients
  std::vector<double> values_;               // value at each breakpoint
};

// ---------------------------------------------------------------------------
// SdeProblem: dX = mu(X) dt + sigma(X) dW (+ rho(X) dN).
// ---------------------------------------------------------------------------

struct SdeProblem {
  PiecewiseDrift drift;
  SmoothCoefficient diffusion;
  std::optional<SmoothCoefficient> jump;  // rho; engaged iff jump_rate > 0
  double jump_rate = 0.0;                 // events per unit time
  double initial = 0.0;                   // xi
  double horizon = 1.0;                   // T

  // Diffusion is nonzero at every drift breakpoint; required before any
  // transform-based scheme may run.
  bool non_degenerate_at_breakpoints() const;
  void validate() const;  // throws ConfigError on inconsistent fields
};

// ---------------------------------------------------------------------------
// TimeGrid
// ---------------------------------------------------------------------------

struct TimeGrid {
  std::vector<double> nodes;  // 0 = t_0 < ... < t_n = T
  double delta = 0.0;         // max spacing, recomputed at construction

  static TimeGrid from_nodes(std::vector<double> nodes);
  std::size_t steps() const { return nodes.size() - 1; }
  double horizon() const { return nodes.back(); }
};

// Equidistant grid with n steps; node k is T*(k/n) so that grids whose step
// counts divide each other share nodes exactly (bitwise).
TimeGrid uniform_grid(double T, std::size_t n);

// Sorted union of two node sets (exact float comparison, duplicates merged).
TimeGrid union_grid(const TimeGrid& a, const TimeGrid& b);

// True when every node of `sub` appears in `super` (exact comparison).
bool is_subgrid(const TimeGrid& sub, const TimeGrid& super);

}  // namespace disdrift
