#include "disdrift/noise.hpp"

#include <algorithm>
#include <cmath>

#include "disdrift/kernels/kernels.hpp"
#include "disdrift/kernels/step_core.hpp"

namespace disdrift {

using kern::Pack1;

// ---------------------------------------------------------------------------
// RngStream (SplitMix64)
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(SeedSpec seed)
    : state_(mix64(seed.master_seed ^
                   (kGolden * (seed.path_index + 0x632be59bd9b4e019ULL)))) {}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform() {
  // (k + 0.5) * 2^-53 for k in [0, 2^53): open interval, symmetric.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  Pack1 z0, z1;
  kern::box_muller_pair(Pack1{u1}, Pack1{u2}, z0, z1);
  spare_ = z1.v;
  has_spare_ = true;
  return z0.v;
}

double RngStream::exponential(double rate) {
  return -kern::log_positive(Pack1{uniform()}).v / rate;
}

void RngStream::fill_normals(double* out, std::size_t n) {
  std::size_t i = 0;
  if (n == 0) return;
  if (has_spare_) {
    out[i++] = spare_;
    has_spare_ = false;
  }
  std::size_t remaining = n - i;
  std::size_t pairs = remaining / 2;
  if (pairs > 0) {
    std::vector<double> u(2 * pairs);
    for (double& v : u) v = uniform();
    kern::active_table().normals_from_uniforms(u.data(), out + i, pairs);
    i += 2 * pairs;
  }
  if (i < n) out[i] = normal();  // odd remainder: one more pair, spare cached
}

// ---------------------------------------------------------------------------
// NoisePath
// ---------------------------------------------------------------------------

NoisePath NoisePath::from_cumulative(TimeGrid grid, std::vector<double> cumulative) {
  if (cumulative.size() != grid.nodes.size())
    throw ConfigError("cumulative values must match grid node count");
  if (cumulative.front() != 0.0) throw ConfigError("Brownian path must start at 0");
  NoisePath p;
  p.increments.resize(cumulative.size() - 1);
  for (std::size_t k = 0; k + 1 < cumulative.size(); ++k)
    p.increments[k] = cumulative[k + 1] - cumulative[k];
  p.grid = std::move(grid);
  p.cumulative = std::move(cumulative);
  return p;
}

NoisePath sample_path(const TimeGrid& grid, SeedSpec seed) {
  RngStream stream(seed);
  return sample_path(grid, stream);
}

NoisePath sample_path(const TimeGrid& grid, RngStream& stream) {
  std::size_t n = grid.steps();
  std::vector<double> z(n);
  stream.fill_normals(z.data(), n);
  std::vector<double> w(n + 1);
  w[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dt = grid.nodes[k + 1] - grid.nodes[k];
    w[k + 1] = w[k] + z[k] * std::sqrt(dt);
  }
  return NoisePath::from_cumulative(grid, std::move(w));
}

namespace {

// One Brownian-bridge sample at time s, conditioned on (ta, wa) and (tb, wb).
// The single spelling shared by every bridging code path, so coupled
// generators agree bitwise when fed the same Gaussians.
double bridge_value(double ta, double wa, double tb, double wb, double s, double z) {
  double span = tb - ta;
  double mean = wa + (s - ta) / span * (wb - wa);
  double sd = std::sqrt((s - ta) * (tb - s) / span);
  return mean + sd * z;
}

}  // namespace

NoisePath refine_bridge(const NoisePath& path, const TimeGrid& fine, SeedSpec seed) {
  if (!is_subgrid(path.grid, fine))
    throw ConfigError("refinement grid must contain every coarse node");
  RngStream stream(seed);
  const auto& coarse_nodes = path.grid.nodes;
  std::vector<double> w(fine.nodes.size());
  std::size_t ci = 0;  // index into coarse nodes
  double last_t = 0.0, last_w = 0.0;
  for (std::size_t j = 0; j < fine.nodes.size(); ++j) {
    double t = fine.nodes[j];
    if (t == coarse_nodes[ci]) {
      w[j] = path.cumulative[ci];  // coarse nodes are copied exactly
      last_t = t;
      last_w = w[j];
      ++ci;
    } else {
      // Interior node of the coarse cell [coarse_nodes[ci-1], coarse_nodes[ci]];
      // condition on the last filled node to the left and the coarse right end.
      double tb = coarse_nodes[ci];
      double wb = path.cumulative[ci];
      w[j] = bridge_value(last_t, last_w, tb, wb, t, stream.normal());
      last_t = t;
      last_w = w[j];
    }
  }
  return NoisePath::from_cumulative(fine, std::move(w));
}

NoisePath coarsen(const NoisePath& path, const TimeGrid& coarse) {
  if (!is_subgrid(coarse, path.grid))
    throw ConfigError("coarse grid must be a subset of the path grid");
  std::vector<double> w(coarse.nodes.size());
  std::size_t j = 0;
  for (std::size_t k = 0; k < coarse.nodes.size(); ++k) {
    while (path.grid.nodes[j] != coarse.nodes[k]) ++j;
    w[k] = path.cumulative[j];
  }
  return NoisePath::from_cumulative(coarse, std::move(w));
}

// ---------------------------------------------------------------------------
// Jumps
// ---------------------------------------------------------------------------

JumpTrain sample_jumps(double rate, double T, SeedSpec seed) {
  if (rate < 0) throw ConfigError("jump rate must be nonnegative");
  JumpTrain train;
  train.rate = rate;
  if (rate == 0) return train;
  RngStream stream(seed);
  double t = 0.0;
  while (true) {
    t += stream.exponential(rate);
    if (t > T) break;
    if (train.event_times.empty() || t > train.event_times.back())
      train.event_times.push_back(t);
  }
  return train;
}

// ---------------------------------------------------------------------------
// OnDemandBrownian (map-backed, arbitrary query times)
// ---------------------------------------------------------------------------

OnDemandBrownian::OnDemandBrownian(SeedSpec seed) : stream_(seed) {
  nodes_[0.0] = 0.0;
}

OnDemandBrownian::OnDemandBrownian(const NoisePath& backbone, SeedSpec bridge_seed)
    : stream_(bridge_seed) {
  for (std::size_t k = 0; k < backbone.grid.nodes.size(); ++k)
    nodes_[backbone.grid.nodes[k]] = backbone.cumulative[k];
}

double OnDemandBrownian::value_at(double t) {
  if (t < 0) throw ConfigError("Brownian query time must be nonnegative");
  auto it = nodes_.lower_bound(t);
  if (it != nodes_.end() && it->first == t) return it->second;
  double w;
  if (it == nodes_.end()) {
    // Fresh extension past the last sampled node.
    auto last = std::prev(nodes_.end());
    w = last->second + stream_.normal() * std::sqrt(t - last->first);
  } else {
    auto right = it;
    auto left = std::prev(it);
    w = bridge_value(left->first, left->second, right->first, right->second, t,
                     stream_.normal());
  }
  nodes_.emplace_hint(it, t, w);
  return w;
}

double OnDemandBrownian::increment(double t_from, double t_to) {
  double a = value_at(t_from);
  double b = value_at(t_to);
  return b - a;
}

// ---------------------------------------------------------------------------
// CoupledBrownianCursor (array-backed, monotone queries)
// ---------------------------------------------------------------------------

CoupledBrownianCursor::CoupledBrownianCursor(const NoisePath& backbone, RngStream& stream)
    : backbone_(backbone), stream_(stream) {}

double CoupledBrownianCursor::value_at(double t) {
  const auto& nodes = backbone_.grid.nodes;
  if (t < prev_t_)
    throw NumericalError("coupled Brownian cursor queried backwards in time");
  if (t > nodes.back())
    throw NumericalError("coupled Brownian cursor queried past the backbone horizon");
  while (cell_ + 1 < nodes.size() && nodes[cell_ + 1] <= t) ++cell_;
  double w;
  if (nodes[cell_] == t) {
    w = backbone_.cumulative[cell_];  // exact backbone hit, no draw
  } else {
    // Left anchor: the later of the containing cell's left node and the
    // previous query (Markov property: only the nearest known values matter).
    double ta = nodes[cell_], wa = backbone_.cumulative[cell_];
    if (prev_t_ > ta) {
      ta = prev_t_;
      wa = prev_w_;
    }
    double tb = nodes[cell_ + 1], wb = backbone_.cumulative[cell_ + 1];
    w = bridge_value(ta, wa, tb, wb, t, stream_.normal());
  }
  prev_t_ = t;
  prev_w_ = w;
  return w;
}

double CoupledBrownianCursor::increment(double t_from, double t_to) {
  double a = value_at(t_from);
  double b = value_at(t_to);
  return b - a;
}

}  // namespace disdrift
