#pragma once
// Monte Carlo strong-error measurement on coupled noise, convergence-order
// regression, adaptive cost curves, exact-solution oracles, the
// Sobolev-Slobodeckij seminorm, and the (1+kappa)/2 rate predictor.
//
// Determinism contract: every result is a pure function of (problem, config,
// master seed). Paths are seeded by (master_seed, path_index), per-path
// results land in arrays indexed by path, and reductions run in a fixed
// order afterwards — so the worker count never changes any output byte.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "disdrift/noise.hpp"
#include "disdrift/sde_core.hpp"

namespace disdrift {

enum class SchemeId { Em, Milstein, TransformEm, TransformMilstein, AdaptiveEm, JumpEm };
enum class ReferencePolicy { Exact, FineGrid };

const char* scheme_name(SchemeId id);
std::optional<SchemeId> scheme_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct LadderPoint {
  double delta = 0;
  double rmse = 0;
  double rmse_stderr = 0;
  double mean_steps = 0;   // mean number of scheme steps (exact for fixed grids)
  double steps_stderr = 0;
};

struct RateReport {
  std::vector<LadderPoint> ladder;  // delta strictly decreasing
  double slope = 0;                 // regressed log2 RMSE vs log2 delta
  double slope_ci = 0;              // 95% half-width (OLS residuals, t quantile)
  int paths = 0;
  std::uint64_t seed = 0;
};

struct CostPoint {
  double delta = 0;
  double mean_steps = 0;
  double steps_stderr = 0;
};

struct CostReport {
  std::vector<CostPoint> curve;
  double slope = 0;  // log2 mean steps vs log2 (1/delta)
  double slope_ci = 0;
  int paths = 0;
  std::uint64_t seed = 0;
};

struct SeminormResult {
  double kappa = 0;
  double value = 0;
  int resolution = 0;   // quadrature grid size n
  double radius = 0;    // domain truncation R
};

// ---------------------------------------------------------------------------
// Strong error pipeline
// ---------------------------------------------------------------------------

struct StrongErrorConfig {
  SchemeId scheme = SchemeId::Em;
  std::vector<double> deltas;  // strictly decreasing; each must divide T
  int paths = 10000;
  ReferencePolicy reference = ReferencePolicy::FineGrid;
  std::uint64_t seed = 0;
  int workers = 1;
  int ref_refine_log2 = 6;  // fine reference at delta_min / 2^6
  double eps0 = 1.0;        // adaptive distance scale
};

// RMSE at T for every ladder delta, all deltas coupled to one fine reference
// per path (same Brownian path via exact coarsening / bridge queries).
// Also reports per-delta mean step counts (interesting for adaptive runs).
std::vector<LadderPoint> strong_error_ladder(const SdeProblem& problem,
                                             const StrongErrorConfig& config);

// Single-delta convenience wrapper: (RMSE, standard error).
std::pair<double, double> strong_error(const SdeProblem& problem, SchemeId scheme,
                                       double delta, int paths,
                                       ReferencePolicy reference, std::uint64_t seed);

// OLS fit of log2 RMSE against log2 delta with a 95% confidence half-width.
RateReport estimate_order(const std::vector<std::pair<double, double>>& ladder);
RateReport estimate_order(const std::vector<LadderPoint>& ladder, int paths,
                          std::uint64_t seed);

// Mean adaptive step counts per delta with the OLS slope against log2(1/delta).
CostReport cost_curve(const SdeProblem& problem, const std::vector<double>& deltas,
                      int paths, double eps0, std::uint64_t seed, int workers = 1);

// ---------------------------------------------------------------------------
// Exact-solution oracles
// ---------------------------------------------------------------------------

struct ExactFamily {
  enum class Kind { Constant, Gbm, Ou } kind = Kind::Constant;
  double p1 = 0;  // Constant: drift c | Gbm: a | Ou: theta
  double p2 = 0;  // Constant: sigma s | Gbm: b | Ou: sigma s
};

// Recognizes the three closed-form families from the problem's coefficients
// (m = 0 and constant/linear shapes); nullopt otherwise.
std::optional<ExactFamily> detect_exact_family(const SdeProblem& problem);

// Exact terminal value evaluated on the given Brownian path. The OU solution
// discretizes its stochastic integral at the path's resolution (left-point
// Ito sums), so it is resolution-limited; constant and GBM are exact.
double exact_solution(const ExactFamily& family, const SdeProblem& problem,
                      const NoisePath& path);

// ---------------------------------------------------------------------------
// Rare-event diagnostics
// ---------------------------------------------------------------------------

// Fraction of EM trajectories (step size delta) entering the closed band
// [zeta - band, zeta + band] around any drift breakpoint before T; the
// initial state counts.
double hitting_fraction(const SdeProblem& problem, double delta, int paths,
                        double band, std::uint64_t seed, int workers = 1);

// ---------------------------------------------------------------------------
// Sobolev-Slobodeckij seminorm and rate prediction
// ---------------------------------------------------------------------------

// |b|_kappa for b(x) = base(x) - subtract(x) (subtract may be null), computed
// on [-R, R]^2: the jump part of b contributes in closed form (the kernel
// integral of a step function is elementary), the continuous remainder and
// the cross term use midpoint quadrature on an n-point grid. Requires the
// centered tail |b(+-R) - midrange| <= 1e-8.
SeminormResult sobolev_seminorm(const PiecewiseDrift& base,
                                const SmoothCoefficient* subtract, double kappa,
                                double radius = 10.0, int resolution = 2000);

// (1 + kappa) / 2 for kappa in [0, 1).
double predicted_order(double kappa);

}  // namespace disdrift
