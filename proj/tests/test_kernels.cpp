#include <cmath>
#include <cstdint>
#include <vector>

#include "disdrift/kernels/kernels.hpp"
#include "disdrift/kernels/pack.hpp"
#include "disdrift/kernels/vecmath.hpp"
#include "disdrift/noise.hpp"
#include "disdrift/schemes.hpp"
#include "disdrift/transform.hpp"
#include "doctest.h"
#include "program_build.hpp"

using namespace disdrift;

namespace {

double pack1_log(double x) {
  return kern::log_positive(kern::Pack1::broadcast(x)).v;
}
double pack1_exp(double x) {
  return kern::exp_pack(kern::Pack1::broadcast(x)).v;
}
double pack1_tanh(double x) {
  return kern::tanh_pack(kern::Pack1::broadcast(x)).v;
}
void pack1_sincos(double x, double& s, double& c) {
  kern::Pack1 sp, cp;
  kern::sincos_pack(kern::Pack1::broadcast(x), sp, cp);
  s = sp.v;
  c = cp.v;
}

double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

// Deterministic test points spread over [lo, hi].
std::vector<double> test_points(double lo, double hi, int n) {
  std::vector<double> xs(n);
  RngStream stream({424242, 0});
  for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * stream.uniform();
  return xs;
}

}  // namespace

TEST_CASE("polynomial math kernels track libm closely") {
  double worst_log = 0, worst_exp = 0, worst_tanh = 0, worst_sin = 0, worst_cos = 0;
  for (double x : test_points(1e-9, 1e6, 4000))
    worst_log = std::max(worst_log, rel_err(pack1_log(x), std::log(x)));
  for (double x : test_points(-30.0, 30.0, 4000))
    worst_exp = std::max(worst_exp, rel_err(pack1_exp(x), std::exp(x)));
  for (double x : test_points(-20.0, 20.0, 4000)) {
    worst_tanh = std::max(worst_tanh, std::abs(pack1_tanh(x) - std::tanh(x)));
    double s, c;
    pack1_sincos(x, s, c);
    worst_sin = std::max(worst_sin, std::abs(s - std::sin(x)));
    worst_cos = std::max(worst_cos, std::abs(c - std::cos(x)));
  }
  CHECK(worst_log < 2e-15);   // relative
  CHECK(worst_exp < 2e-15);   // relative
  CHECK(worst_tanh < 1e-14);  // absolute (|tanh| <= 1)
  CHECK(worst_sin < 8e-15);   // absolute (|sin| <= 1)
  CHECK(worst_cos < 8e-15);

  // Exact anchor points.
  CHECK(pack1_log(1.0) == 0.0);
  CHECK(pack1_exp(0.0) == 1.0);
  CHECK(pack1_tanh(0.0) == 0.0);
}

TEST_CASE("scalar and avx2 tables agree bitwise") {
  const kern::KernelTable& scalar = kern::scalar_table();
  const kern::KernelTable* avx2 = kern::avx2_table();
  CHECK(std::string(scalar.name) == "scalar");
  CHECK(scalar.width == 1);
  if (!avx2) {
    MESSAGE("AVX2 unavailable on this host; cross-variant checks skipped");
    return;
  }
  CHECK(avx2->width == 4);

  // Box-Muller over a deterministic uniform block, including sizes that
  // leave a scalar tail after the vector body.
  for (std::size_t n_pairs : {1u, 2u, 5u, 64u, 129u}) {
    std::vector<double> u(2 * n_pairs);
    RngStream stream({7, n_pairs});
    for (double& x : u) x = stream.uniform();
    std::vector<double> z_scalar(2 * n_pairs), z_avx2(2 * n_pairs);
    scalar.normals_from_uniforms(u.data(), z_scalar.data(), n_pairs);
    avx2->normals_from_uniforms(u.data(), z_avx2.data(), n_pairs);
    CHECK(z_scalar == z_avx2);
  }

  // Reductions: the fixed 4-bin pattern makes the sum order identical.
  std::vector<double> a, b;
  RngStream stream({8, 8});
  for (int i = 0; i < 1037; ++i) {
    a.push_back(stream.normal());
    b.push_back(stream.normal());
  }
  for (std::size_t n : {1u, 3u, 4u, 17u, 1024u, 1037u}) {
    CHECK(scalar.dot(a.data(), b.data(), n) == avx2->dot(a.data(), b.data(), n));
    for (std::size_t d : {1u, 2u, 7u}) {
      if (d >= n) continue;
      CHECK(scalar.offset_cross_sum(a.data(), b.data(), n, d) ==
            avx2->offset_cross_sum(a.data(), b.data(), n, d));
    }
  }
}

TEST_CASE("blocked stepper: lanes match the public schemes bitwise") {
  // A problem that exercises every program feature: discontinuous drift,
  // sine diffusion, transform bumps, Milstein correction.
  const SdeProblem problem{PiecewiseDrift({0.0}, {{2.5}, {-1.5}}, {0.5}),
                           SmoothCoefficient::sine(1.0, 0.2, 1.0), std::nullopt, 0.0, 1.0, 1.0};
  const TransformG g = build_transform(problem.drift, problem.diffusion);

  const TimeGrid grid = uniform_grid(1.0, 64);
  const double dt = 1.0 / 64;
  const std::size_t n = 64;

  // Five independent paths: an odd count exercises the padded tail lane of
  // the 4-wide variant. Each table consumes [step][lane] blocks of its own
  // width, exactly as the Monte Carlo engine feeds it.
  std::vector<NoisePath> paths;
  for (std::uint64_t l = 0; l < 5; ++l) paths.push_back(sample_path(grid, {321, l}));

  const auto run_terminals = [&](const kern::KernelTable& table,
                                 const kern::StepProgram& prog) {
    const auto w = static_cast<std::size_t>(table.width);
    std::vector<double> out(paths.size());
    for (std::size_t base = 0; base < paths.size(); base += w) {
      const std::size_t lanes = std::min(w, paths.size() - base);
      std::vector<double> inc(n * w), x0(w, problem.initial), term(w, 0.0);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < w; ++l)
          inc[k * w + l] = paths[base + (l < lanes ? l : 0)].increments[k];
      REQUIRE(table.run_fixed_block(prog, inc.data(), n, dt, x0.data(), term.data(), nullptr));
      for (std::size_t l = 0; l < lanes; ++l) out[base + l] = term[l];
    }
    return out;
  };

  struct Variant {
    const TransformG* g;
    bool milstein;
  };
  for (const Variant v : {Variant{nullptr, false}, Variant{nullptr, true},
                          Variant{&g, false}, Variant{&g, true}}) {
    const StepProgramStorage storage =
        build_step_program(problem, v.g, v.milstein, /*track_min_dist=*/false);
    const kern::StepProgram prog = storage.view();

    const std::vector<double> terminal_scalar = run_terminals(kern::scalar_table(), prog);
    const std::vector<double> terminal_active = run_terminals(kern::active_table(), prog);
    CHECK(terminal_scalar == terminal_active);

    for (std::size_t l = 0; l < paths.size(); ++l) {
      Trajectory traj;
      if (v.g && v.milstein) traj = transformed_milstein(problem, grid, paths[l], g);
      else if (v.g) traj = transform_method(problem, grid, paths[l], g);
      else if (v.milstein) traj = milstein(problem, grid, paths[l]);
      else traj = euler_maruyama(problem, grid, paths[l]);
      CHECK(terminal_scalar[l] == traj.terminal());
    }
  }
}

TEST_CASE("blocked stepper: min-distance tracking sees the closest approach") {
  const SdeProblem problem{PiecewiseDrift({0.0}, {{1.0}, {-1.0}}, {0.0}),
                           SmoothCoefficient::constant(0.0),  // deterministic
                           std::nullopt, 0.0, 0.5, 1.0};

  const int n = 8;  // x walks 0.5, 0.375, ..., hits 0 exactly at step 4
  const double dt = 1.0 / n;
  std::vector<double> inc(n, 0.0);
  const double x0 = problem.initial;
  const StepProgramStorage storage = build_step_program(problem, nullptr, false, true);
  double terminal = 0, min_dist = -1;
  REQUIRE(kern::scalar_table().run_fixed_block(storage.view(), inc.data(), n, dt, &x0,
                                               &terminal, &min_dist));
  CHECK(min_dist == 0.0);
  CHECK(terminal == 0.0);  // drift value at the breakpoint is 0, so it parks

  // Starting away and drifting away, the minimum stays the initial distance.
  SdeProblem away = problem;
  away.drift = PiecewiseDrift({0.0}, {{-1.0}, {1.0}}, {0.0});
  away.initial = 0.25;
  const StepProgramStorage st2 = build_step_program(away, nullptr, false, true);
  const double y0 = away.initial;
  REQUIRE(kern::scalar_table().run_fixed_block(st2.view(), inc.data(), n, dt, &y0, &terminal,
                                               &min_dist));
  CHECK(min_dist == 0.25);
  CHECK(terminal == doctest::Approx(1.25));
}

TEST_CASE("forcing scalar kernels changes the active table, not the results") {
  const kern::KernelTable& active = kern::active_table();
  kern::force_scalar_kernels(true);
  CHECK(std::string(kern::active_table().name) == "scalar");
  CHECK(kern::scalar_kernels_forced());
  kern::force_scalar_kernels(false);
  CHECK(kern::active_table().name == active.name);
}
