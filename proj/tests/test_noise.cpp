#include <cmath>
#include <vector>

#include "disdrift/noise.hpp"
#include "doctest.h"

using namespace disdrift;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("rng stream: deterministic, array fill matches scalar draws") {
  RngStream a({17, 3});
  RngStream b({17, 3});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c({17, 4});
  CHECK(a.next_u64() != c.next_u64());  // distinct path index, distinct stream

  // fill_normals consumes the stream exactly like repeated normal() calls,
  // including the cached Box-Muller spare.
  RngStream s1({99, 0});
  RngStream s2({99, 0});
  (void)s1.normal();  // leaves one spare cached
  (void)s2.normal();
  CHECK(s1.has_cached_normal());
  std::vector<double> block(7);
  s1.fill_normals(block.data(), block.size());
  for (double z : block) CHECK(z == s2.normal());
  CHECK(s1.next_u64() == s2.next_u64());  // streams stay aligned afterwards

  RngStream u({5, 5});
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("brownian path: moments and the increments invariant") {
  const TimeGrid grid = uniform_grid(1.0, 8);
  const NoisePath p = sample_path(grid, {123, 0});
  REQUIRE(p.cumulative.size() == 9);
  CHECK(p.cumulative.front() == 0.0);
  for (std::size_t k = 0; k + 1 < p.cumulative.size(); ++k)
    CHECK(p.increments[k] == p.cumulative[k + 1] - p.cumulative[k]);  // bitwise

  // Same seed, same path; sibling index, different path.
  const NoisePath q = sample_path(grid, {123, 0});
  CHECK(p.cumulative == q.cumulative);
  CHECK(sample_path(grid, {123, 1}).cumulative != p.cumulative);

  // Terminal values over many paths: mean 0, variance T (3 sigma bounds:
  // sd(mean) = 1/sqrt(M), sd(sample var) ~ sqrt(2/M)).
  const int M = 4000;
  std::vector<double> terminal(M);
  for (int i = 0; i < M; ++i) terminal[i] = sample_path(grid, {2024, (std::uint64_t)i}).terminal();
  CHECK(std::abs(mean(terminal)) < 3.0 / std::sqrt((double)M));
  CHECK(std::abs(variance(terminal) - 1.0) < 3.0 * std::sqrt(2.0 / M));

  CHECK_THROWS_AS(NoisePath::from_cumulative(grid, {0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(NoisePath::from_cumulative(uniform_grid(1.0, 1), {0.5, 1.0}), ConfigError);
}

TEST_CASE("bridge refinement: exact round trip and conditional law") {
  const TimeGrid coarse = uniform_grid(1.0, 8);
  const TimeGrid fine = uniform_grid(1.0, 64);
  const NoisePath base = sample_path(coarse, {7, 11});
  const NoisePath refined = refine_bridge(base, fine, {7, 11});
  REQUIRE(refined.cumulative.size() == 65);

  // Coarse nodes are preserved bitwise, so coarsening undoes refinement.
  const NoisePath back = coarsen(refined, coarse);
  CHECK(back.cumulative == base.cumulative);
  for (std::size_t k = 0; k <= 8; ++k) CHECK(refined.cumulative[8 * k] == base.cumulative[k]);

  // Midpoint of a single-interval backbone: W(1/2) | W(1) ~ N(W(1)/2, 1/4).
  const TimeGrid one = uniform_grid(1.0, 1);
  const TimeGrid half = uniform_grid(1.0, 2);
  const int M = 4000;
  std::vector<double> centered(M);
  for (int i = 0; i < M; ++i) {
    const NoisePath bb = sample_path(one, {31, (std::uint64_t)i});
    const NoisePath r = refine_bridge(bb, half, {77, (std::uint64_t)i});
    CHECK(r.cumulative.back() == bb.cumulative.back());
    centered[i] = r.cumulative[1] - 0.5 * bb.cumulative.back();
  }
  CHECK(std::abs(mean(centered)) < 3.0 * 0.5 / std::sqrt((double)M));
  CHECK(std::abs(variance(centered) - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / M));

  // The fine grid must contain the coarse nodes.
  CHECK_THROWS_AS(refine_bridge(base, TimeGrid::from_nodes({0.0, 0.3, 1.0}), {1, 1}),
                  ConfigError);
  CHECK_THROWS_AS(coarsen(base, TimeGrid::from_nodes({0.0, 0.3, 1.0})), ConfigError);
}

TEST_CASE("coarsen: increments become exact sums of fine increments") {
  const NoisePath fine = sample_path(uniform_grid(2.0, 32), {55, 0});
  const NoisePath coarse = coarsen(fine, uniform_grid(2.0, 4));
  for (std::size_t k = 0; k <= 4; ++k) CHECK(coarse.cumulative[k] == fine.cumulative[8 * k]);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(coarse.increments[k] == coarse.cumulative[k + 1] - coarse.cumulative[k]);
}

TEST_CASE("poisson jumps: determinism, support, and mean count") {
  CHECK(sample_jumps(0.0, 1.0, {1, 1}).event_times.empty());
  CHECK_THROWS_AS(sample_jumps(-1.0, 1.0, {1, 1}), ConfigError);

  const JumpTrain a = sample_jumps(3.0, 2.0, {40, 9});
  const JumpTrain b = sample_jumps(3.0, 2.0, {40, 9});
  CHECK(a.event_times == b.event_times);
  for (std::size_t i = 0; i < a.event_times.size(); ++i) {
    CHECK(a.event_times[i] > 0.0);
    CHECK(a.event_times[i] <= 2.0);
    if (i > 0) CHECK(a.event_times[i] > a.event_times[i - 1]);
  }

  const int M = 4000;
  double total = 0;
  for (int i = 0; i < M; ++i) total += sample_jumps(1.0, 1.0, {88, (std::uint64_t)i}).event_times.size();
  // Count ~ Poisson(1): mean 1, sd 1; 3 sigma band for the sample mean.
  CHECK(std::abs(total / M - 1.0) < 3.0 / std::sqrt((double)M));
}

TEST_CASE("on-demand brownian: consistent, additive, couples to the cursor") {
  OnDemandBrownian w({64, 2});
  const double w3 = w.value_at(0.3);
  const double w7 = w.value_at(0.7);
  const double w5 = w.value_at(0.5);  // interior bridge query after the fact
  CHECK(w.value_at(0.3) == w3);       // repeat queries are cached
  CHECK(w.value_at(0.5) == w5);
  CHECK(w.increment(0.3, 0.7) == doctest::Approx(w7 - w3).epsilon(1e-15));
  CHECK(w.increment(0.3, 0.5) + w.increment(0.5, 0.7) ==
        doctest::Approx(w.increment(0.3, 0.7)).epsilon(1e-14));
  CHECK(w.value_at(0.0) == 0.0);
  CHECK_THROWS_AS(w.value_at(-0.1), ConfigError);

  // Fresh-extension statistics: W(2) - W(1) over many sources ~ N(0, 1).
  const int M = 4000;
  std::vector<double> inc(M);
  for (int i = 0; i < M; ++i) {
    OnDemandBrownian s({909, (std::uint64_t)i});
    inc[i] = s.increment(1.0, 2.0);
  }
  CHECK(std::abs(mean(inc)) < 3.0 / std::sqrt((double)M));
  CHECK(std::abs(variance(inc) - 1.0) < 3.0 * std::sqrt(2.0 / M));

  // Backbone-conditioned map version and the array cursor serve identical
  // values for identical strictly-increasing query sequences.
  const NoisePath backbone = sample_path(uniform_grid(1.0, 16), {500, 1});
  const std::vector<double> queries{0.01, 0.0625, 0.11, 0.25, 0.26, 0.75, 0.99, 1.0};
  OnDemandBrownian map_version(backbone, {500, 1});
  RngStream bridge_stream({500, 1});
  CoupledBrownianCursor cursor(backbone, bridge_stream);
  for (double t : queries) CHECK(cursor.value_at(t) == map_version.value_at(t));

  RngStream s2({500, 1});
  CoupledBrownianCursor strict(backbone, s2);
  (void)strict.value_at(0.5);
  CHECK_THROWS_AS(strict.value_at(0.25), NumericalError);
  CHECK_THROWS_AS(strict.value_at(1.5), NumericalError);
}
