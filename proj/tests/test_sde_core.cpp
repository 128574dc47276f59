#include <cmath>

#include "disdrift/sde_core.hpp"
#include "doctest.h"

using namespace disdrift;

namespace {

// Central finite difference for cross-checking the symbolic derivatives.
template <class F>
double fd(F f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("smooth coefficient catalog: values and symbolic derivatives") {
  const auto c = SmoothCoefficient::constant(3.5);
  CHECK(c(0.0) == 3.5);
  CHECK(c(-7.0) == 3.5);
  CHECK(c.deriv(2.0) == 0.0);
  CHECK(c.is_constant());
  CHECK(!c.is_zero());
  CHECK(SmoothCoefficient::constant(0.0).is_zero());

  const auto a = SmoothCoefficient::affine(1.0, -2.0);
  CHECK(a(3.0) == doctest::Approx(-5.0));
  CHECK(a.deriv(100.0) == -2.0);
  CHECK(a.deriv2(1.0) == 0.0);

  const auto p = SmoothCoefficient::polynomial({1.0, 0.0, -0.5, 2.0});  // 1 - x^2/2 + 2x^3
  for (double x : {-1.3, 0.0, 0.7, 2.1}) {
    CHECK(p(x) == doctest::Approx(1 - 0.5 * x * x + 2 * x * x * x));
    CHECK(p.deriv(x) == doctest::Approx(fd([&](double y) { return p(y); }, x)).epsilon(1e-6));
    CHECK(p.deriv2(x) ==
          doctest::Approx(fd([&](double y) { return p.deriv(y); }, x)).epsilon(1e-6));
  }

  const auto s = SmoothCoefficient::sine(1.0, 0.2, 1.0);
  CHECK(s(0.0) == doctest::Approx(1.0));
  CHECK(s(M_PI / 2) == doctest::Approx(1.2));
  const auto t = SmoothCoefficient::tanh_shape(0.0, 1.0, 2.0);
  CHECK(t(0.0) == 0.0);
  CHECK(t(50.0) == doctest::Approx(1.0));
  for (double x : {-0.9, 0.3, 1.8}) {
    CHECK(s.deriv(x) == doctest::Approx(fd([&](double y) { return s(y); }, x)).epsilon(1e-6));
    CHECK(t.deriv(x) == doctest::Approx(fd([&](double y) { return t(y); }, x)).epsilon(1e-6));
    CHECK(t.deriv2(x) ==
          doctest::Approx(fd([&](double y) { return t.deriv(y); }, x)).epsilon(1e-5));
  }

  CHECK(SmoothCoefficient::polynomial({0.0, 0.0}).is_constant());
  CHECK(SmoothCoefficient::polynomial({0.0, 0.0}).is_zero());
  CHECK_THROWS_AS(SmoothCoefficient::polynomial({}), ConfigError);
}

TEST_CASE("piecewise drift: one-sided limits and breakpoint values") {
  // mu(x) = 0.5 - 2 sign(x): 2.5 left of 0, -1.5 right of 0, 0.5 at 0.
  const PiecewiseDrift mu({0.0}, {{2.5}, {-1.5}}, {0.5});
  CHECK(mu(-1.0) == 2.5);
  CHECK(mu(-1e-12) == 2.5);
  CHECK(mu(1e-12) == -1.5);
  CHECK(mu(4.0) == -1.5);
  CHECK(mu(0.0) == 0.5);
  const auto [left, right] = mu.one_sided_limits(0);
  CHECK(left == doctest::Approx(2.5));
  CHECK(right == doctest::Approx(-1.5));

  // Without explicit values the breakpoint takes the right limit.
  const PiecewiseDrift nov({0.0}, {{2.5}, {-1.5}});
  CHECK(nov(0.0) == -1.5);

  // Two breakpoints, middle piece quadratic: limits evaluate the adjacent
  // pieces at the breakpoint itself.
  const PiecewiseDrift two({-1.0, 1.0}, {{1.0}, {0.0, 0.0, 1.0}, {-1.0}}, {0.25, -0.25});
  CHECK(two(-2.0) == 1.0);
  CHECK(two(0.5) == doctest::Approx(0.25));
  CHECK(two(-1.0) == 0.25);
  CHECK(two(1.0) == -0.25);
  auto [l0, r0] = two.one_sided_limits(0);
  CHECK(l0 == doctest::Approx(1.0));
  CHECK(r0 == doctest::Approx(1.0));  // x^2 at -1
  auto [l1, r1] = two.one_sided_limits(1);
  CHECK(l1 == doctest::Approx(1.0));  // x^2 at 1
  CHECK(r1 == doctest::Approx(-1.0));
  CHECK(two.piece_derivative(0.5) == doctest::Approx(1.0));  // d/dx x^2 at 0.5
  CHECK(two.piece_derivative(-3.0) == 0.0);

  const PiecewiseDrift smooth = PiecewiseDrift::smooth({0.0, 0.5});
  CHECK(smooth.breakpoint_count() == 0);
  CHECK(smooth(2.0) == doctest::Approx(1.0));
  CHECK(smooth.piece_derivative(-9.0) == doctest::Approx(0.5));
}

TEST_CASE("piecewise drift: construction rejects inconsistent shapes") {
  CHECK_THROWS_AS(PiecewiseDrift({0.0}, {{1.0}}), ConfigError);  // needs 2 pieces
  CHECK_THROWS_AS(PiecewiseDrift({1.0, 1.0}, {{1.0}, {2.0}, {3.0}}), ConfigError);
  CHECK_THROWS_AS(PiecewiseDrift({2.0, -1.0}, {{1.0}, {2.0}, {3.0}}), ConfigError);
  CHECK_THROWS_AS(PiecewiseDrift({0.0}, {{1.0}, {}}), ConfigError);
  CHECK_THROWS_AS(PiecewiseDrift({0.0}, {{1.0}, {2.0}}, {0.0, 0.0}), ConfigError);
}

TEST_CASE("piecewise drift: declared Lipschitz bound survives dense sampling") {
  const PiecewiseDrift mu({0.0}, {{2.5}, {0.0, -1.5, 0.25}}, {0.5});
  const double bound = mu.lipschitz_bound(4.0);
  // Each piece is measured on its own side: the left constant contributes 0,
  // the right piece has |-1.5 + 0.5 x| <= 1.5 on (0, 4]; 5% headroom on top.
  CHECK(bound >= 1.5);
  CHECK(bound <= 1.6);
  CHECK(mu.spot_check_lipschitz(4.0, bound));
  CHECK(!mu.spot_check_lipschitz(4.0, bound / 10));
}

TEST_CASE("sde problem validation") {
  const SdeProblem p{PiecewiseDrift({0.0}, {{1.0}, {-1.0}}, {0.0}),
                     SmoothCoefficient::constant(1.0), std::nullopt, 0.0, 0.1, 1.0};
  CHECK_NOTHROW(p.validate());
  CHECK(p.non_degenerate_at_breakpoints());

  SdeProblem bad = p;
  bad.horizon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = p;
  bad.jump_rate = 1.0;  // rate without a jump coefficient
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = p;
  bad.jump = SmoothCoefficient::constant(0.5);  // coefficient without a rate
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = p;
  bad.jump = SmoothCoefficient::constant(0.5);
  bad.jump_rate = 2.0;
  CHECK_NOTHROW(bad.validate());

  // sigma(x) = x vanishes exactly at the breakpoint.
  SdeProblem degen = p;
  degen.diffusion = SmoothCoefficient::affine(0.0, 1.0);
  CHECK(!degen.non_degenerate_at_breakpoints());
}

TEST_CASE("time grids: dyadic uniform grids nest bitwise") {
  const TimeGrid g4 = uniform_grid(1.0, 4);
  const TimeGrid g16 = uniform_grid(1.0, 16);
  CHECK(g4.steps() == 4);
  CHECK(g4.nodes.front() == 0.0);
  CHECK(g4.nodes.back() == 1.0);
  CHECK(g4.delta == doctest::Approx(0.25));
  // Node values are T*(k/n), so the coarse nodes appear in the fine grid
  // bit-for-bit.
  for (std::size_t k = 0; k <= 4; ++k) CHECK(g4.nodes[k] == g16.nodes[4 * k]);
  CHECK(is_subgrid(g4, g16));
  CHECK(!is_subgrid(g16, g4));

  const TimeGrid u = union_grid(g4, TimeGrid::from_nodes({0.0, 0.3, 1.0}));
  CHECK(u.nodes.size() == 6);  // 0, .25, .3, .5, .75, 1
  CHECK(is_subgrid(g4, u));
  CHECK(u.nodes[2] == 0.3);

  CHECK_THROWS_AS(TimeGrid::from_nodes({0.0}), ConfigError);
  CHECK_THROWS_AS(TimeGrid::from_nodes({0.1, 0.5}), ConfigError);
  CHECK_THROWS_AS(TimeGrid::from_nodes({0.0, 0.5, 0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(uniform_grid(0.0, 4), ConfigError);
}
