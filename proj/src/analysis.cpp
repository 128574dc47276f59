#include "disdrift/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "disdrift/kernels/kernels.hpp"
#include "disdrift/schemes.hpp"
#include "disdrift/transform.hpp"
#include "program_build.hpp"
#include "seed_salts.hpp"

namespace disdrift {

namespace {

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Standard error of the mean of `v` from up to 20 contiguous batches. Batch
// boundaries depend only on v.size(), so the result is schedule-independent.
double batch_se_of_mean(const std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t b = std::min<std::size_t>(20, n);
  if (b < 2) return 0.0;
  std::vector<double> means(b, 0.0);
  const std::size_t base = n / b, rem = n % b;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t len = base + (i < rem ? 1 : 0);
    double acc = 0.0;
    for (std::size_t j = 0; j < len; ++j) acc += v[pos + j];
    means[i] = acc / static_cast<double>(len);
    pos += len;
  }
  return sample_sd(means) / std::sqrt(static_cast<double>(b));
}

// Two-sided 95% Student-t quantile; exact table through 30 degrees of
// freedom, then a 1/dof interpolation toward the normal quantile.
double t95(int dof) {
  static const double table[] = {
      12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060,
      2.2622,  2.2281, 2.2010, 2.1788, 2.1604, 2.1448, 2.1315, 2.1199,
      2.1098,  2.1009, 2.0930, 2.0860, 2.0796, 2.0739, 2.0687, 2.0639,
      2.0595,  2.0555, 2.0518, 2.0484, 2.0452, 2.0423};
  if (dof < 1) return 0.0;
  if (dof <= 30) return table[dof - 1];
  const double z = 1.959964;
  return z + (table[29] - z) * (30.0 / static_cast<double>(dof));
}

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  int dof = 0;
};

OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("order regression needs distinct deltas");
  OlsFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.dof = static_cast<int>(n) - 2;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  const double s2 = f.dof > 0 ? ssr / f.dof : 0.0;
  f.slope_se = std::sqrt(s2 / sxx);
  return f;
}

// ---------------------------------------------------------------------------
// Worker pool: chunks are claimed from an atomic counter, results land in
// per-path slots, so outputs never depend on the worker count.
// ---------------------------------------------------------------------------

void parallel_chunks(int workers, std::size_t n_chunks,
                     const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw ConfigError("workers must be positive");
  const int w = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), n_chunks));
  if (w <= 1) {
    for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_chunks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (int i = 0; i < w; ++i) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Exact-solution helpers
// ---------------------------------------------------------------------------

bool poly_as_constant(const std::vector<double>& c, double& value) {
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] != 0.0) return false;
  value = c.empty() ? 0.0 : c[0];
  return true;
}

bool poly_as_pure_linear(const std::vector<double>& c, double& a) {
  if (c.size() < 2 || c[0] != 0.0) return false;
  for (std::size_t i = 2; i < c.size(); ++i)
    if (c[i] != 0.0) return false;
  a = c[1];
  return true;
}

bool sigma_pure_linear(const SmoothCoefficient& s, double& b) {
  if (s.kind() == SmoothCoefficient::Kind::Affine && s.c0() == 0.0) {
    b = s.c1();
    return true;
  }
  if (s.kind() == SmoothCoefficient::Kind::Polynomial)
    return poly_as_pure_linear(s.coeffs(), b);
  return false;
}

// Left-point Ito sum for the OU stochastic integral; weights[j] must be
// exp(-theta * (T - t_j)) on the path's grid.
double ou_terminal(double theta, double sigma, double xi, double T,
                   const std::vector<double>& weights, const NoisePath& path) {
  if (weights.size() != path.increments.size())
    throw ConfigError("weight vector does not match the path resolution");
  const double integral = kern::active_table().dot(
      weights.data(), path.increments.data(), weights.size());
  return std::exp(-theta * T) * xi + sigma * integral;
}

std::vector<double> ou_weights_for(const TimeGrid& grid, double theta) {
  const double T = grid.horizon();
  std::vector<double> w(grid.steps());
  for (std::size_t j = 0; j < w.size(); ++j)
    w[j] = std::exp(-theta * (T - grid.nodes[j]));
  return w;
}

// ---------------------------------------------------------------------------
// Strong-error ladder plan
// ---------------------------------------------------------------------------

struct LadderPlan {
  const SdeProblem* problem = nullptr;
  StrongErrorConfig cfg;
  std::vector<std::size_t> nk;    // scheme step counts per delta (increasing)
  std::vector<TimeGrid> grids;    // uniform scheme grids per delta
  TimeGrid ref_grid;              // uniform reference backbone grid
  bool blocked_scheme = false;    // fixed-grid scheme runs through the kernels

  std::optional<StepProgramStorage> scheme_prog;  // blocked schemes only
  std::optional<StepProgramStorage> ref_prog;     // fine-grid refs (non-jump)
  std::optional<ExactFamily> fam;                 // exact reference policy
  std::vector<double> ou_weights;                 // exact OU only
};

std::size_t steps_for(double T, double delta) {
  if (!(delta > 0.0)) throw ConfigError("ladder deltas must be positive");
  const double q = T / delta;
  const auto n = static_cast<std::size_t>(std::llround(q));
  if (n < 1 || std::abs(q - static_cast<double>(n)) > 1e-9 * std::max(1.0, q))
    throw ConfigError("ladder deltas must divide the horizon");
  return n;
}

LadderPlan make_plan(const SdeProblem& problem, const StrongErrorConfig& cfg) {
  problem.validate();
  if (cfg.deltas.empty()) throw ConfigError("ladder needs at least one delta");
  for (std::size_t i = 1; i < cfg.deltas.size(); ++i)
    if (!(cfg.deltas[i] < cfg.deltas[i - 1]))
      throw ConfigError("ladder deltas must be strictly decreasing");
  if (cfg.paths < 1) throw ConfigError("paths must be positive");
  if (cfg.workers < 1) throw ConfigError("workers must be positive");
  if (cfg.ref_refine_log2 < 0 || cfg.ref_refine_log2 > 20)
    throw ConfigError("reference refinement exponent must lie in [0, 20]");

  const bool is_jump = cfg.scheme == SchemeId::JumpEm;
  const bool has_jump = problem.jump_rate > 0.0 && problem.jump.has_value();
  if (is_jump && !has_jump)
    throw ConfigError("the jump scheme requires a jump coefficient with positive rate");
  if (!is_jump && has_jump)
    throw ConfigError("this problem has jumps; only the jump scheme integrates them");

  LadderPlan plan;
  plan.problem = &problem;
  plan.cfg = cfg;
  const double T = problem.horizon;
  for (double d : cfg.deltas) plan.nk.push_back(steps_for(T, d));
  for (std::size_t n : plan.nk) plan.grids.push_back(uniform_grid(T, n));

  // Reference grid. The exact policy needs no fine stepping, so its backbone
  // matches the finest scheme grid, except for OU whose stochastic integral
  // is resolution-limited and gets the full refinement.
  const std::size_t n_max = plan.nk.back();
  std::size_t n_ref = n_max;
  if (cfg.reference == ReferencePolicy::Exact) {
    plan.fam = detect_exact_family(problem);
    if (!plan.fam)
      throw ConfigError("exact reference requested but the problem has no closed-form solution");
    if (plan.fam->kind == ExactFamily::Kind::Ou)
      n_ref = n_max << cfg.ref_refine_log2;
  } else {
    n_ref = n_max << cfg.ref_refine_log2;
  }
  if (n_ref > (std::size_t{1} << 22))
    throw ConfigError("reference grid exceeds 2^22 steps; coarsen the ladder or the refinement");
  for (std::size_t n : plan.nk)
    if (n_ref % n != 0)
      throw ConfigError("every ladder step count must divide the reference step count");
  plan.ref_grid = uniform_grid(T, n_ref);
  if (plan.fam && plan.fam->kind == ExactFamily::Kind::Ou)
    plan.ou_weights = ou_weights_for(plan.ref_grid, plan.fam->p1);

  // Scheme program (fixed-grid schemes run blocked through the kernels).
  switch (cfg.scheme) {
    case SchemeId::Em:
      plan.blocked_scheme = true;
      plan.scheme_prog = build_step_program(problem, nullptr, false, false);
      break;
    case SchemeId::Milstein:
      plan.blocked_scheme = true;
      plan.scheme_prog = build_step_program(problem, nullptr, true, false);
      break;
    case SchemeId::TransformEm:
    case SchemeId::TransformMilstein: {
      if (problem.drift.breakpoint_count() > 0 && !problem.non_degenerate_at_breakpoints())
        throw ConfigError(
            "transform scheme requires nonzero diffusion at every drift breakpoint");
      const TransformG g = build_transform(problem.drift, problem.diffusion);
      plan.blocked_scheme = true;
      plan.scheme_prog = build_step_program(
          problem, &g, cfg.scheme == SchemeId::TransformMilstein, false);
      break;
    }
    case SchemeId::AdaptiveEm:
    case SchemeId::JumpEm:
      plan.blocked_scheme = false;
      break;
  }

  // Fine-grid reference program: the transformed Milstein scheme on the
  // reference grid when the transform applies, plain Milstein otherwise.
  // Jump problems use the jump scheme on a per-path union grid instead.
  if (cfg.reference == ReferencePolicy::FineGrid && !is_jump) {
    const bool can_transform = problem.drift.breakpoint_count() > 0 &&
                               problem.non_degenerate_at_breakpoints();
    if (can_transform) {
      const TransformG g = build_transform(problem.drift, problem.diffusion);
      plan.ref_prog = build_step_program(problem, &g, true, false);
    } else {
      plan.ref_prog = build_step_program(problem, nullptr, true, false);
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Chunk drivers. One chunk = one block of `width` consecutive path indices.
// ---------------------------------------------------------------------------

void interleave_increments(const std::vector<NoisePath>& paths, int width,
                           std::size_t n_steps, std::vector<double>& out) {
  out.resize(n_steps * static_cast<std::size_t>(width));
  for (std::size_t j = 0; j < n_steps; ++j)
    for (int l = 0; l < width; ++l)
      out[j * width + l] = paths[l].increments[j];
}

// Reference terminal values for one block of backbone paths (real lanes only).
void reference_terminals(const LadderPlan& plan, const kern::KernelTable& table,
                         const std::vector<NoisePath>& backbones, std::size_t lanes,
                         std::vector<double>& out, std::vector<double>& scratch) {
  const int width = table.width;
  out.assign(width, 0.0);
  if (plan.fam) {
    for (std::size_t l = 0; l < lanes; ++l) {
      if (plan.fam->kind == ExactFamily::Kind::Ou)
        out[l] = ou_terminal(plan.fam->p1, plan.fam->p2, plan.problem->initial,
                             plan.problem->horizon, plan.ou_weights, backbones[l]);
      else
        out[l] = exact_solution(*plan.fam, *plan.problem, backbones[l]);
    }
    return;
  }
  const std::size_t n_ref = plan.ref_grid.steps();
  interleave_increments(backbones, width, n_ref, scratch);
  std::vector<double> x0(width, plan.problem->initial);
  if (!table.run_fixed_block(plan.ref_prog->view(), scratch.data(), n_ref,
                             plan.problem->horizon / static_cast<double>(n_ref),
                             x0.data(), out.data(), nullptr))
    throw NumericalError("transform inversion failed to converge in the reference run");
}

void fixed_chunk(const LadderPlan& plan, std::size_t base, std::size_t lanes,
                 std::vector<std::vector<double>>& sq_err,
                 std::vector<std::vector<double>>& steps) {
  const auto& table = kern::active_table();
  const int width = table.width;
  std::vector<NoisePath> backbones(width);
  for (std::size_t l = 0; l < lanes; ++l)
    backbones[l] = sample_path(plan.ref_grid, SeedSpec{plan.cfg.seed, base + l});
  for (int l = static_cast<int>(lanes); l < width; ++l) backbones[l] = backbones[0];

  std::vector<double> ref(width, 0.0), scratch;
  reference_terminals(plan, table, backbones, lanes, ref, scratch);

  std::vector<NoisePath> coarse(width);
  std::vector<double> x0(width, plan.problem->initial), term(width, 0.0);
  for (std::size_t k = 0; k < plan.grids.size(); ++k) {
    const std::size_t n = plan.nk[k];
    for (int l = 0; l < width; ++l) coarse[l] = coarsen(backbones[l], plan.grids[k]);
    interleave_increments(coarse, width, n, scratch);
    if (!table.run_fixed_block(plan.scheme_prog->view(), scratch.data(), n,
                               plan.problem->horizon / static_cast<double>(n),
                               x0.data(), term.data(), nullptr))
      throw NumericalError("transform inversion failed to converge");
    for (std::size_t l = 0; l < lanes; ++l) {
      const double e = term[l] - ref[l];
      sq_err[k][base + l] = e * e;
      steps[k][base + l] = static_cast<double>(n);
    }
  }
}

void adaptive_chunk(const LadderPlan& plan, std::size_t base, std::size_t lanes,
                    std::vector<std::vector<double>>& sq_err,
                    std::vector<std::vector<double>>& steps) {
  const auto& table = kern::active_table();
  const int width = table.width;
  // Backbones come from the same per-path streams that later serve the bridge
  // queries, so every draw is a pure function of (seed, path index).
  std::vector<RngStream> streams;
  streams.reserve(lanes);
  std::vector<NoisePath> backbones(width);
  for (std::size_t l = 0; l < lanes; ++l) {
    streams.emplace_back(SeedSpec{plan.cfg.seed, base + l});
    backbones[l] = sample_path(plan.ref_grid, streams[l]);
  }
  for (int l = static_cast<int>(lanes); l < width; ++l) backbones[l] = backbones[0];

  std::vector<double> ref(width, 0.0), scratch;
  reference_terminals(plan, table, backbones, lanes, ref, scratch);

  for (std::size_t l = 0; l < lanes; ++l) {
    for (std::size_t k = 0; k < plan.grids.size(); ++k) {
      CoupledBrownianCursor cursor(backbones[l], streams[l]);
      StepPolicy policy;
      policy.delta = plan.cfg.deltas[k];
      policy.mode = StepPolicy::Mode::Adaptive;
      policy.eps0 = plan.cfg.eps0;
      const Trajectory traj = adaptive_euler_maruyama(*plan.problem, policy, cursor);
      const double e = traj.terminal() - ref[l];
      sq_err[k][base + l] = e * e;
      steps[k][base + l] = static_cast<double>(traj.step_count());
    }
  }
}

TimeGrid events_grid(const JumpTrain& jumps, double T) {
  std::vector<double> nodes;
  nodes.reserve(jumps.event_times.size() + 2);
  nodes.push_back(0.0);
  for (double t : jumps.event_times)
    if (t < T) nodes.push_back(t);
  nodes.push_back(T);
  return TimeGrid::from_nodes(std::move(nodes));
}

void jump_chunk(const LadderPlan& plan, std::size_t base, std::size_t lanes,
                std::vector<std::vector<double>>& sq_err,
                std::vector<std::vector<double>>& steps) {
  const double T = plan.problem->horizon;
  for (std::size_t l = 0; l < lanes; ++l) {
    const std::size_t p = base + l;
    const JumpTrain jumps = sample_jumps(plan.problem->jump_rate, T,
                                         SeedSpec{plan.cfg.seed ^ kJumpSeedSalt, p});
    const TimeGrid evg = events_grid(jumps, T);
    const TimeGrid ref_union = union_grid(plan.ref_grid, evg);
    const NoisePath backbone = sample_path(plan.ref_grid, SeedSpec{plan.cfg.seed, p});
    const NoisePath full =
        ref_union.nodes.size() == plan.ref_grid.nodes.size()
            ? backbone
            : refine_bridge(backbone, ref_union,
                            SeedSpec{plan.cfg.seed ^ kBridgeSeedSalt, p});
    const double ref =
        jump_euler_maruyama(*plan.problem, ref_union, full, jumps).terminal();
    for (std::size_t k = 0; k < plan.grids.size(); ++k) {
      const TimeGrid gk = union_grid(plan.grids[k], evg);
      const NoisePath noise = coarsen(full, gk);
      const Trajectory traj = jump_euler_maruyama(*plan.problem, gk, noise, jumps);
      const double e = traj.terminal() - ref;
      sq_err[k][p] = e * e;
      steps[k][p] = static_cast<double>(traj.step_count());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

const char* scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::Em: return "em";
    case SchemeId::Milstein: return "milstein";
    case SchemeId::TransformEm: return "transform-em";
    case SchemeId::TransformMilstein: return "transform-milstein";
    case SchemeId::AdaptiveEm: return "adaptive-em";
    case SchemeId::JumpEm: return "jump-em";
  }
  return "unknown";
}

std::optional<SchemeId> scheme_from_name(const std::string& name) {
  for (SchemeId id : {SchemeId::Em, SchemeId::Milstein, SchemeId::TransformEm,
                      SchemeId::TransformMilstein, SchemeId::AdaptiveEm,
                      SchemeId::JumpEm})
    if (name == scheme_name(id)) return id;
  return std::nullopt;
}

std::vector<LadderPoint> strong_error_ladder(const SdeProblem& problem,
                                             const StrongErrorConfig& config) {
  const LadderPlan plan = make_plan(problem, config);
  const auto M = static_cast<std::size_t>(config.paths);
  const std::size_t K = config.deltas.size();
  std::vector<std::vector<double>> sq_err(K, std::vector<double>(M, 0.0));
  std::vector<std::vector<double>> steps(K, std::vector<double>(M, 0.0));

  const auto width = static_cast<std::size_t>(kern::active_table().width);
  const std::size_t n_chunks = (M + width - 1) / width;
  parallel_chunks(config.workers, n_chunks, [&](std::size_t c) {
    const std::size_t base = c * width;
    const std::size_t lanes = std::min(width, M - base);
    if (plan.blocked_scheme)
      fixed_chunk(plan, base, lanes, sq_err, steps);
    else if (config.scheme == SchemeId::AdaptiveEm)
      adaptive_chunk(plan, base, lanes, sq_err, steps);
    else
      jump_chunk(plan, base, lanes, sq_err, steps);
  });

  std::vector<LadderPoint> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    LadderPoint& pt = out[k];
    pt.delta = config.deltas[k];
    const double mse = mean_of(sq_err[k]);
    pt.rmse = std::sqrt(mse);
    const double se_mse = batch_se_of_mean(sq_err[k]);
    pt.rmse_stderr = pt.rmse > 0.0 ? se_mse / (2.0 * pt.rmse) : 0.0;
    pt.mean_steps = mean_of(steps[k]);
    pt.steps_stderr = sample_sd(steps[k]) / std::sqrt(static_cast<double>(M));
  }
  return out;
}

std::pair<double, double> strong_error(const SdeProblem& problem, SchemeId scheme,
                                       double delta, int paths,
                                       ReferencePolicy reference, std::uint64_t seed) {
  StrongErrorConfig cfg;
  cfg.scheme = scheme;
  cfg.deltas = {delta};
  cfg.paths = paths;
  cfg.reference = reference;
  cfg.seed = seed;
  const auto pts = strong_error_ladder(problem, cfg);
  return {pts.front().rmse, pts.front().rmse_stderr};
}

RateReport estimate_order(const std::vector<LadderPoint>& ladder, int paths,
                          std::uint64_t seed) {
  if (ladder.size() < 4)
    throw ConfigError("order regression needs at least four ladder points");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (i > 0 && !(ladder[i].delta < ladder[i - 1].delta))
      throw ConfigError("ladder deltas must be strictly decreasing");
    if (!(ladder[i].rmse > 0.0))
      throw ConfigError("order regression is undefined when an RMSE is zero");
    xs.push_back(std::log2(ladder[i].delta));
    ys.push_back(std::log2(ladder[i].rmse));
  }
  const OlsFit fit = ols_fit(xs, ys);
  RateReport report;
  report.ladder = ladder;
  report.slope = fit.slope;
  report.slope_ci = t95(fit.dof) * fit.slope_se;
  report.paths = paths;
  report.seed = seed;
  return report;
}

RateReport estimate_order(const std::vector<std::pair<double, double>>& ladder) {
  std::vector<LadderPoint> pts(ladder.size());
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    pts[i].delta = ladder[i].first;
    pts[i].rmse = ladder[i].second;
  }
  return estimate_order(pts, 0, 0);
}

CostReport cost_curve(const SdeProblem& problem, const std::vector<double>& deltas,
                      int paths, double eps0, std::uint64_t seed, int workers) {
  problem.validate();
  if (problem.jump_rate > 0.0)
    throw ConfigError("the adaptive scheme does not integrate jump terms");
  if (deltas.size() < 2) throw ConfigError("cost curve needs at least two deltas");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1]))
      throw ConfigError("ladder deltas must be strictly decreasing");
  if (paths < 1) throw ConfigError("paths must be positive");

  const auto M = static_cast<std::size_t>(paths);
  const std::size_t K = deltas.size();
  std::vector<std::vector<double>> counts(K, std::vector<double>(M, 0.0));
  parallel_chunks(workers, M, [&](std::size_t p) {
    for (std::size_t k = 0; k < K; ++k) {
      OnDemandBrownian source(SeedSpec{seed, p});
      StepPolicy policy;
      policy.delta = deltas[k];
      policy.mode = StepPolicy::Mode::Adaptive;
      policy.eps0 = eps0;
      const Trajectory traj = adaptive_euler_maruyama(problem, policy, source);
      counts[k][p] = static_cast<double>(traj.step_count());
    }
  });

  CostReport report;
  report.paths = paths;
  report.seed = seed;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < K; ++k) {
    CostPoint pt;
    pt.delta = deltas[k];
    pt.mean_steps = mean_of(counts[k]);
    pt.steps_stderr = sample_sd(counts[k]) / std::sqrt(static_cast<double>(M));
    report.curve.push_back(pt);
    xs.push_back(-std::log2(deltas[k]));
    ys.push_back(std::log2(pt.mean_steps));
  }
  const OlsFit fit = ols_fit(xs, ys);
  report.slope = fit.slope;
  report.slope_ci = fit.dof > 0 ? t95(fit.dof) * fit.slope_se : 0.0;
  return report;
}

std::optional<ExactFamily> detect_exact_family(const SdeProblem& problem) {
  if (problem.jump_rate > 0.0) return std::nullopt;
  if (problem.drift.breakpoint_count() != 0) return std::nullopt;
  const auto& piece = problem.drift.pieces().front();
  double c = 0, a = 0, b = 0;
  const bool drift_const = poly_as_constant(piece, c);
  const bool drift_linear = poly_as_pure_linear(piece, a);
  const bool sigma_const = problem.diffusion.is_constant();
  const bool sigma_linear = sigma_pure_linear(problem.diffusion, b);
  if (drift_const && sigma_const)
    return ExactFamily{ExactFamily::Kind::Constant, c, problem.diffusion(0.0)};
  if (drift_linear && sigma_const)
    return ExactFamily{ExactFamily::Kind::Ou, -a, problem.diffusion(0.0)};
  if (drift_linear && sigma_linear)
    return ExactFamily{ExactFamily::Kind::Gbm, a, b};
  return std::nullopt;
}

double exact_solution(const ExactFamily& family, const SdeProblem& problem,
                      const NoisePath& path) {
  const double T = path.grid.horizon();
  const double xi = problem.initial;
  switch (family.kind) {
    case ExactFamily::Kind::Constant:
      return xi + family.p1 * T + family.p2 * path.terminal();
    case ExactFamily::Kind::Gbm:
      return xi * std::exp((family.p1 - 0.5 * family.p2 * family.p2) * T +
                           family.p2 * path.terminal());
    case ExactFamily::Kind::Ou: {
      const std::vector<double> weights = ou_weights_for(path.grid, family.p1);
      return ou_terminal(family.p1, family.p2, xi, T, weights, path);
    }
  }
  throw ConfigError("unknown exact family");
}

double hitting_fraction(const SdeProblem& problem, double delta, int paths,
                        double band, std::uint64_t seed, int workers) {
  problem.validate();
  if (problem.jump_rate > 0.0)
    throw ConfigError("hitting diagnostics run on continuous problems only");
  if (problem.drift.breakpoint_count() == 0)
    throw ConfigError("hitting fraction requires at least one drift breakpoint");
  if (!(band >= 0.0)) throw ConfigError("band radius must be nonnegative");
  if (paths < 1) throw ConfigError("paths must be positive");
  const std::size_t n = steps_for(problem.horizon, delta);
  const TimeGrid grid = uniform_grid(problem.horizon, n);
  const StepProgramStorage prog = build_step_program(problem, nullptr, false, true);

  const auto M = static_cast<std::size_t>(paths);
  std::vector<double> hit(M, 0.0);
  const auto width = static_cast<std::size_t>(kern::active_table().width);
  const std::size_t n_chunks = (M + width - 1) / width;
  parallel_chunks(workers, n_chunks, [&](std::size_t c) {
    const auto& table = kern::active_table();
    const int w = table.width;
    const std::size_t base = c * width;
    const std::size_t lanes = std::min(width, M - base);
    std::vector<NoisePath> block(w);
    for (std::size_t l = 0; l < lanes; ++l)
      block[l] = sample_path(grid, SeedSpec{seed, base + l});
    for (int l = static_cast<int>(lanes); l < w; ++l) block[l] = block[0];
    std::vector<double> scratch, x0(w, problem.initial), term(w, 0.0), dist(w, 0.0);
    interleave_increments(block, w, n, scratch);
    if (!table.run_fixed_block(prog.view(), scratch.data(), n,
                               problem.horizon / static_cast<double>(n), x0.data(),
                               term.data(), dist.data()))
      throw NumericalError("blocked run failed");
    for (std::size_t l = 0; l < lanes; ++l)
      hit[base + l] = dist[l] <= band ? 1.0 : 0.0;
  });
  double acc = 0.0;
  for (double h : hit) acc += h;
  return acc / static_cast<double>(M);
}

double predicted_order(double kappa) {
  if (!(kappa >= 0.0) || !(kappa < 1.0))
    throw ConfigError("smoothness exponent must lie in [0, 1)");
  return 0.5 * (1.0 + kappa);
}

}  // namespace disdrift
