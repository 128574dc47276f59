#include "disdrift/sde_core.hpp"

#include <algorithm>
#include <cmath>

#include "disdrift/kernels/step_core.hpp"

namespace disdrift {

using kern::Pack1;

// ---------------------------------------------------------------------------
// SmoothCoefficient
// ---------------------------------------------------------------------------
// Evaluation goes through the same Pack1 code paths as the blocked kernels
// (vecmath sin/tanh, fma Horner), so scalar per-path schemes and the SIMD
// block steppers see bit-identical coefficient values.

SmoothCoefficient SmoothCoefficient::constant(double value) {
  return {Kind::Constant, value, 0, 0, {}};
}
SmoothCoefficient SmoothCoefficient::affine(double c0, double c1) {
  return {Kind::Affine, c0, c1, 0, {}};
}
SmoothCoefficient SmoothCoefficient::polynomial(std::vector<double> cs) {
  if (cs.empty()) throw ConfigError("polynomial coefficient vector must be nonempty");
  return {Kind::Polynomial, 0, 0, 0, std::move(cs)};
}
SmoothCoefficient SmoothCoefficient::sine(double c0, double c1, double c2) {
  return {Kind::Sine, c0, c1, c2, {}};
}
SmoothCoefficient SmoothCoefficient::tanh_shape(double c0, double c1, double c2) {
  return {Kind::Tanh, c0, c1, c2, {}};
}

namespace {

double eval_poly1(const std::vector<double>& c, double x) {
  return kern::eval_poly<Pack1>(c.data(), static_cast<int>(c.size()), Pack1{x}).v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  if (d.empty()) d.push_back(0.0);
  return d;
}

}  // namespace

double SmoothCoefficient::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return c0_;
    case Kind::Affine:
      return fmadd(Pack1{c1_}, Pack1{x}, Pack1{c0_}).v;
    case Kind::Polynomial:
      return eval_poly1(coeffs_, x);
    case Kind::Sine: {
      Pack1 s, c;
      kern::sincos_pack(Pack1{c2_} * Pack1{x}, s, c);
      return fmadd(Pack1{c1_}, s, Pack1{c0_}).v;
    }
    case Kind::Tanh: {
      Pack1 t = kern::tanh_pack(Pack1{c2_} * Pack1{x});
      return fmadd(Pack1{c1_}, t, Pack1{c0_}).v;
    }
  }
  return 0;
}

double SmoothCoefficient::deriv(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return 0;
    case Kind::Affine:
      return c1_;
    case Kind::Polynomial:
      return eval_poly1(poly_derivative(coeffs_), x);
    case Kind::Sine: {
      Pack1 s, c;
      kern::sincos_pack(Pack1{c2_} * Pack1{x}, s, c);
      return (Pack1{c1_ * c2_} * c).v;
    }
    case Kind::Tanh: {
      Pack1 t = kern::tanh_pack(Pack1{c2_} * Pack1{x});
      return (Pack1{c1_ * c2_} * fmadd(-t, t, Pack1{1.0})).v;
    }
  }
  return 0;
}

double SmoothCoefficient::deriv2(double x) const {
  switch (kind_) {
    case Kind::Constant:
    case Kind::Affine:
      return 0;
    case Kind::Polynomial:
      return eval_poly1(poly_derivative(poly_derivative(coeffs_)), x);
    case Kind::Sine: {
      Pack1 s, c;
      kern::sincos_pack(Pack1{c2_} * Pack1{x}, s, c);
      return (Pack1{-c1_ * c2_ * c2_} * s).v;
    }
    case Kind::Tanh: {
      Pack1 t = kern::tanh_pack(Pack1{c2_} * Pack1{x});
      Pack1 sech2 = fmadd(-t, t, Pack1{1.0});
      return (Pack1{-2.0 * c1_ * c2_ * c2_} * t * sech2).v;
    }
  }
  return 0;
}

bool SmoothCoefficient::is_zero() const {
  switch (kind_) {
    case Kind::Constant:
      return c0_ == 0;
    case Kind::Affine:
      return c0_ == 0 && c1_ == 0;
    case Kind::Polynomial:
      return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0; });
    case Kind::Sine:
    case Kind::Tanh:
      return c0_ == 0 && (c1_ == 0 || c2_ == 0);
  }
  return false;
}

bool SmoothCoefficient::is_constant() const {
  switch (kind_) {
    case Kind::Constant:
      return true;
    case Kind::Affine:
      return c1_ == 0;
    case Kind::Polynomial:
      return coeffs_.size() <= 1 ||
             std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0; });
    case Kind::Sine:
    case Kind::Tanh:
      return c1_ == 0 || c2_ == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// PiecewiseDrift
// ---------------------------------------------------------------------------

PiecewiseDrift::PiecewiseDrift(std::vector<double> breakpoints,
                               std::vector<std::vector<double>> pieces,
                               std::vector<double> values_at_breakpoints)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      values_(std::move(values_at_breakpoints)) {
  if (pieces_.size() != breakpoints_.size() + 1)
    throw ConfigError("drift needs exactly one more piece than breakpoints");
  for (auto& p : pieces_)
    if (p.empty()) throw ConfigError("drift piece coefficient vector must be nonempty");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k)
    if (!(breakpoints_[k - 1] < breakpoints_[k]))
      throw ConfigError("drift breakpoints must be strictly increasing");
  if (values_.empty()) {
    // Default convention: the value at a breakpoint is the right limit.
    for (std::size_t k = 0; k < breakpoints_.size(); ++k)
      values_.push_back(eval_poly1(pieces_[k + 1], breakpoints_[k]));
  } else if (values_.size() != breakpoints_.size()) {
    throw ConfigError("breakpoint value count must match breakpoint count");
  }
}

PiecewiseDrift PiecewiseDrift::smooth(std::vector<double> ascending_coeffs) {
  return PiecewiseDrift({}, {std::move(ascending_coeffs)});
}

double PiecewiseDrift::operator()(double x) const {
  double res = eval_poly1(pieces_[0], x);
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (x > breakpoints_[k]) res = eval_poly1(pieces_[k + 1], x);
    if (x == breakpoints_[k]) res = values_[k];
  }
  return res;
}

std::pair<double, double> PiecewiseDrift::one_sided_limits(std::size_t k) const {
  if (k >= breakpoints_.size())
    throw ConfigError("breakpoint index out of range");
  double z = breakpoints_[k];
  return {eval_poly1(pieces_[k], z), eval_poly1(pieces_[k + 1], z)};
}

double PiecewiseDrift::piece_derivative(double x) const {
  std::size_t piece = 0;
  while (piece < breakpoints_.size() && x > breakpoints_[piece]) ++piece;
  return eval_poly1(poly_derivative(pieces_[piece]), x);
}

double PiecewiseDrift::lipschitz_bound(double box_radius) const {
  // Dense sampling of |piece'| over the box; 5% headroom over the sampled max.
  double bound = 0;
  const int kSamples = 4096;
  for (int i = 0; i <= kSamples; ++i) {
    double x = -box_radius + 2 * box_radius * (static_cast<double>(i) / kSamples);
    bound = std::max(bound, std::fabs(piece_derivative(x)));
  }
  return bound * 1.05;
}

bool PiecewiseDrift::spot_check_lipschitz(double box_radius, double declared_bound,
                                          int samples) const {
  // Pairs are drawn within a single piece; the drift is only piecewise
  // Lipschitz, so pairs straddling a breakpoint are excluded.
  std::uint64_t s = 0x9e3779b97f4a7c15ULL;
  auto next01 = [&s]() {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1p-53;
  };
  for (int i = 0; i < samples; ++i) {
    double x = -box_radius + 2 * box_radius * next01();
    double y = x + (next01() - 0.5) * 0.01 * box_radius;
    y = std::clamp(y, -box_radius, box_radius);
    bool same_piece = true;
    for (double z : breakpoints_)
      if ((x - z) * (y - z) <= 0) same_piece = false;
    if (!same_piece || x == y) continue;
    if (std::fabs((*this)(x) - (*this)(y)) > declared_bound * std::fabs(x - y))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// SdeProblem
// ---------------------------------------------------------------------------

bool SdeProblem::non_degenerate_at_breakpoints() const {
  for (double z : drift.breakpoints())
    if (diffusion(z) == 0.0) return false;
  return true;
}

void SdeProblem::validate() const {
  if (!(horizon > 0)) throw ConfigError("horizon T must be positive");
  if (jump_rate < 0) throw ConfigError("jump rate must be nonnegative");
  if (jump.has_value() != (jump_rate > 0))
    throw ConfigError("jump coefficient must be present exactly when jump_rate > 0");
}

// ---------------------------------------------------------------------------
// TimeGrid
// ---------------------------------------------------------------------------

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw ConfigError("time grid needs at least two nodes");
  if (nodes.front() != 0.0) throw ConfigError("time grid must start at 0");
  double delta = 0;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k - 1] < nodes[k]))
      throw ConfigError("time grid nodes must be strictly increasing");
    delta = std::max(delta, nodes[k] - nodes[k - 1]);
  }
  TimeGrid g;
  g.nodes = std::move(nodes);
  g.delta = delta;
  return g;
}

TimeGrid uniform_grid(double T, std::size_t n) {
  if (!(T > 0)) throw ConfigError("horizon T must be positive");
  if (n < 1) throw ConfigError("step count must be at least 1");
  std::vector<double> nodes(n + 1);
  // T * (k/n): the rational k/n is rounded once, so grids whose step counts
  // divide each other produce bitwise-identical shared nodes.
  for (std::size_t k = 0; k <= n; ++k)
    nodes[k] = T * (static_cast<double>(k) / static_cast<double>(n));
  nodes[0] = 0.0;
  nodes[n] = T;
  return TimeGrid::from_nodes(std::move(nodes));
}

TimeGrid union_grid(const TimeGrid& a, const TimeGrid& b) {
  std::vector<double> nodes;
  nodes.reserve(a.nodes.size() + b.nodes.size());
  std::size_t i = 0, j = 0;
  while (i < a.nodes.size() || j < b.nodes.size()) {
    double next;
    if (j == b.nodes.size() || (i < a.nodes.size() && a.nodes[i] <= b.nodes[j])) {
      next = a.nodes[i];
      if (j < b.nodes.size() && b.nodes[j] == next) ++j;
      ++i;
    } else {
      next = b.nodes[j++];
    }
    nodes.push_back(next);
  }
  return TimeGrid::from_nodes(std::move(nodes));
}

bool is_subgrid(const TimeGrid& sub, const TimeGrid& super) {
  std::size_t j = 0;
  for (double t : sub.nodes) {
    while (j < super.nodes.size() && super.nodes[j] < t) ++j;
    if (j == super.nodes.size() || super.nodes[j] != t) return false;
  }
  return true;
}

}  // namespace disdrift
