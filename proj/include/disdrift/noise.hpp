#pragma once
// Deterministic, seedable Brownian and Poisson noise with multi-resolution
// coupling. Paths are keyed by (master_seed, path_index) so Monte Carlo runs
// are reproducible independent of worker scheduling. Cumulative values are
// the primary representation; increments are materialized as their adjacent
// differences, which makes refine/coarsen round trips exact.

#include <cstdint>
#include <map>
#include <vector>

#include "disdrift/sde_core.hpp"

namespace disdrift {

// ---------------------------------------------------------------------------
// SeedSpec and the per-path random stream
// ---------------------------------------------------------------------------

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
};

// Counter-derived SplitMix64 stream. The mapping (master_seed, path_index)
// -> stream is a pure function; distinct path indices give independent
// streams through the SplitMix64 finalizer.
class RngStream {
 public:
  explicit RngStream(SeedSpec seed);

  std::uint64_t next_u64();
  double uniform();      // open interval (0, 1)
  double normal();       // standard Gaussian, Box-Muller, pairs cached
  double exponential(double rate);

  // Fills out[0..n) with standard Gaussians. Consumes the stream exactly as
  // n successive normal() calls would (same uniforms, same pairing), but the
  // transform runs through the dispatched array kernel.
  void fill_normals(double* out, std::size_t n);

  bool has_cached_normal() const { return has_spare_; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// NoisePath
// ---------------------------------------------------------------------------

struct NoisePath {
  TimeGrid grid;
  std::vector<double> cumulative;  // W at nodes, cumulative[0] = 0
  std::vector<double> increments;  // exactly cumulative[k+1] - cumulative[k]

  // Rebuilds increments from cumulative and validates the type invariants.
  static NoisePath from_cumulative(TimeGrid grid, std::vector<double> cumulative);
  double terminal() const { return cumulative.back(); }
};

// Brownian path on the grid: increment k ~ N(0, t_{k+1} - t_k).
NoisePath sample_path(const TimeGrid& grid, SeedSpec seed);

// Same construction from a live stream; the caller keeps consuming the stream
// afterwards (e.g. for bridge queries conditioned on this backbone).
NoisePath sample_path(const TimeGrid& grid, RngStream& stream);

// Conditional refinement: returns a path on `fine` (superset of path.grid)
// that coarsens back to `path` exactly; interior nodes follow the Brownian
// bridge law, with bridge Gaussians drawn from a stream built from `seed`.
NoisePath refine_bridge(const NoisePath& path, const TimeGrid& fine, SeedSpec seed);

// Restriction to a subset grid; increments become exact sums (differences of
// the shared cumulative values).
NoisePath coarsen(const NoisePath& path, const TimeGrid& coarse);

// ---------------------------------------------------------------------------
// Jumps
// ---------------------------------------------------------------------------

struct JumpTrain {
  std::vector<double> event_times;  // strictly increasing, in (0, T]
  double rate = 0.0;
};

// Homogeneous Poisson event times on (0, T] via exponential inter-arrivals.
JumpTrain sample_jumps(double rate, double T, SeedSpec seed);

// ---------------------------------------------------------------------------
// On-demand Brownian values for the adaptive scheme
// ---------------------------------------------------------------------------

// Serves W at arbitrary query times, drawing fresh Gaussians for extensions
// past the last sampled node and Brownian-bridge Gaussians for queries that
// land inside an already-sampled interval.
class BrownianSource {
 public:
  virtual ~BrownianSource() = default;
  virtual double increment(double t_from, double t_to) = 0;
};

class OnDemandBrownian final : public BrownianSource {
 public:
  explicit OnDemandBrownian(SeedSpec seed);
  // Pre-seeds the node set with an existing path, so subsequent queries are
  // conditioned on it (couples an adaptive run to a fixed-grid reference).
  OnDemandBrownian(const NoisePath& backbone, SeedSpec bridge_seed);

  double value_at(double t);  // W(t), sampling lazily
  double increment(double t_from, double t_to) override;

 private:
  RngStream stream_;
  std::map<double, double> nodes_;  // t -> W(t); always contains {0, 0}
};

// Array-backed fast path used by the analysis pipeline: queries must be
// strictly increasing in time and stay within the backbone horizon. Same
// conditional law (and, for identical query sequences, identical values) as
// OnDemandBrownian seeded with the same backbone and stream.
class CoupledBrownianCursor final : public BrownianSource {
 public:
  CoupledBrownianCursor(const NoisePath& backbone, RngStream& stream);
  double value_at(double t);
  double increment(double t_from, double t_to) override;

 private:
  const NoisePath& backbone_;
  RngStream& stream_;
  double prev_t_ = 0.0;
  double prev_w_ = 0.0;
  std::size_t cell_ = 0;  // index of backbone node <= prev_t_
};

}  // namespace disdrift
