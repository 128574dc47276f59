#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "disdrift/cli.hpp"
#include "disdrift/schemes.hpp"
#include "disdrift/transform.hpp"
#include "seed_salts.hpp"

namespace disdrift {

namespace {

// Uniform step count for one delta; rejects deltas that do not divide T.
std::size_t grid_steps(double T, double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const double q = T / delta;
  const auto n = static_cast<std::size_t>(std::llround(q));
  if (n < 1 || std::abs(q - static_cast<double>(n)) > 1e-9 * std::max(1.0, q))
    throw ConfigError("ladder deltas must divide the horizon");
  return n;
}

// Grid containing exactly {0, interior event times, T}. Jump event times
// must be grid nodes for the jump scheme, so simulation grids are unions
// with this one.
TimeGrid events_grid(const JumpTrain& jumps, double T) {
  std::vector<double> nodes{0.0};
  for (double t : jumps.event_times)
    if (t < T) nodes.push_back(t);
  nodes.push_back(T);
  return TimeGrid::from_nodes(std::move(nodes));
}

const SdeProblem& require_problem(const ExperimentConfig& config, const char* what) {
  if (!config.problem)
    throw ConfigError(std::string(what) + " requires a problem (preset name or inline definition)");
  return *config.problem;
}

std::string default_or(const std::string& output, const char* fallback) {
  return output.empty() ? std::string(fallback) : output;
}

std::string reference_name(ReferencePolicy policy) {
  return policy == ReferencePolicy::Exact ? "exact" : "fine-grid";
}

void footer_run_context(CsvWriter& csv, const ExperimentConfig& config, int paths) {
  std::string line = "scheme=";
  line += scheme_name(config.scheme);
  if (!config.problem_name.empty()) line += ", problem=" + config.problem_name;
  line += ", paths=" + std::to_string(paths);
  line += ", seed=" + std::to_string(config.seed);
  line += ", reference=" + reference_name(config.reference);
  csv.comment(line);
}

std::string slope_footer(double slope, double ci) {
  return "slope=" + CsvWriter::format(slope) + ", ci=" + CsvWriter::format(ci);
}

// Log-log plot of a ladder CSV with a guide line of the fitted slope
// anchored at the first ladder point. Column 1 is delta; `ycol` selects the
// measured quantity and `ecol` its standard error.
std::string ladder_plot_script(const std::string& csv, const char* ylabel, int ycol,
                               int ecol, double slope, double x0, double y0) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set logscale xy 2\n";
  s += "set xlabel 'delta'\n";
  s += "set ylabel '" + std::string(ylabel) + "'\n";
  s += "slope = " + CsvWriter::format(slope) + "\n";
  s += "x0 = " + CsvWriter::format(x0) + "\n";
  s += "y0 = " + CsvWriter::format(y0) + "\n";
  s += "plot '" + csv + "' skip 1 using 1:" + std::to_string(ycol) + ":" +
       std::to_string(ecol) + " with yerrorbars title 'measured', \\\n";
  s += "     y0 * (x/x0)**slope with lines title sprintf('slope %.3f', slope)\n";
  return s;
}

}  // namespace

void run_simulate(const ExperimentConfig& config) {
  const SdeProblem& problem = require_problem(config, "simulate");
  if (config.delta_ladder.size() != 1)
    throw ConfigError("simulate requires exactly one delta in delta_ladder");
  const double delta = config.delta_ladder.front();
  const double T = problem.horizon;
  const std::size_t n = grid_steps(T, delta);
  const int paths = config.paths.value_or(4);
  if (paths < 1) throw ConfigError("paths must be at least 1");

  const TimeGrid grid = uniform_grid(T, n);
  TransformG g;
  const bool transformed =
      config.scheme == SchemeId::TransformEm || config.scheme == SchemeId::TransformMilstein;
  if (transformed) g = build_transform(problem.drift, problem.diffusion);
  if (config.scheme == SchemeId::JumpEm && problem.jump_rate <= 0.0)
    throw ConfigError("scheme jump-em requires a problem with jumps");

  CsvWriter csv(default_or(config.output, "simulate.csv"));
  csv.header({"path_id", "t", "x"});
  for (int p = 0; p < paths; ++p) {
    const SeedSpec seed{config.seed, static_cast<std::uint64_t>(p)};
    Trajectory traj;
    switch (config.scheme) {
      case SchemeId::Em:
        traj = euler_maruyama(problem, grid, sample_path(grid, seed));
        break;
      case SchemeId::Milstein:
        traj = milstein(problem, grid, sample_path(grid, seed));
        break;
      case SchemeId::TransformEm:
        traj = transform_method(problem, grid, sample_path(grid, seed), g);
        break;
      case SchemeId::TransformMilstein:
        traj = transformed_milstein(problem, grid, sample_path(grid, seed), g);
        break;
      case SchemeId::AdaptiveEm: {
        OnDemandBrownian source(seed);
        StepPolicy policy{delta, StepPolicy::Mode::Adaptive, config.eps0};
        traj = adaptive_euler_maruyama(problem, policy, source);
        break;
      }
      case SchemeId::JumpEm: {
        const JumpTrain jumps = sample_jumps(
            problem.jump_rate, T, {config.seed ^ kJumpSeedSalt, static_cast<std::uint64_t>(p)});
        const TimeGrid run_grid = union_grid(grid, events_grid(jumps, T));
        traj = jump_euler_maruyama(problem, run_grid, sample_path(run_grid, seed), jumps);
        break;
      }
    }
    const std::string id = std::to_string(p);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      csv.row({id, CsvWriter::format(traj.times[k]), CsvWriter::format(traj.values[k])});
  }
  csv.flush();

  std::string script;
  script += "set datafile separator ','\n";
  script += "set xlabel 't'\n";
  script += "set ylabel 'x'\n";
  script += "set key off\n";
  script += "plot for [p=0:" + std::to_string(paths - 1) + "] '" + csv.path() +
            "' skip 1 using 2:($1 == p ? $3 : 1/0) with lines\n";
  write_gnuplot_script(csv.path(), script);
  std::printf("wrote %d path(s) to %s\n", paths, csv.path().c_str());
}

void run_estimate_order(const ExperimentConfig& config) {
  const SdeProblem& problem = require_problem(config, "estimate-order");
  if (config.delta_ladder.size() < 4)
    throw ConfigError("order regression needs at least 4 ladder points");
  const int paths = config.paths.value_or(10000);

  StrongErrorConfig run;
  run.scheme = config.scheme;
  run.deltas = config.delta_ladder;
  run.paths = paths;
  run.reference = config.reference;
  run.seed = config.seed;
  run.workers = config.workers;
  run.ref_refine_log2 = config.ref_refine_log2;
  run.eps0 = config.eps0;
  const std::vector<LadderPoint> ladder = strong_error_ladder(problem, run);
  const RateReport report = estimate_order(ladder, paths, config.seed);

  CsvWriter csv(default_or(config.output, "estimate-order.csv"));
  csv.header({"delta", "rmse", "stderr"});
  for (const LadderPoint& point : ladder)
    csv.numeric_row({point.delta, point.rmse, point.rmse_stderr});
  csv.comment(slope_footer(report.slope, report.slope_ci));
  footer_run_context(csv, config, paths);
  csv.flush();

  write_gnuplot_script(csv.path(),
                       ladder_plot_script(csv.path(), "rmse", 2, 3, report.slope,
                                          ladder.front().delta, ladder.front().rmse));
  std::printf("slope=%s ci=%s (%s, %d paths) -> %s\n", CsvWriter::format(report.slope).c_str(),
              CsvWriter::format(report.slope_ci).c_str(), scheme_name(config.scheme), paths,
              csv.path().c_str());
}

void run_adaptive_cost(const ExperimentConfig& config) {
  const SdeProblem& problem = require_problem(config, "adaptive-cost");
  if (config.scheme != SchemeId::AdaptiveEm)
    throw ConfigError("adaptive-cost requires scheme \"adaptive-em\"");
  if (config.delta_ladder.size() < 4)
    throw ConfigError("cost regression needs at least 4 ladder points");
  const int paths = config.paths.value_or(1000);

  const CostReport report = cost_curve(problem, config.delta_ladder, paths, config.eps0,
                                       config.seed, config.workers);

  CsvWriter csv(default_or(config.output, "adaptive-cost.csv"));
  csv.header({"delta", "mean_steps", "stderr"});
  for (const CostPoint& point : report.curve)
    csv.numeric_row({point.delta, point.mean_steps, point.steps_stderr});
  csv.comment(slope_footer(report.slope, report.slope_ci));
  footer_run_context(csv, config, paths);
  csv.flush();

  // Cost grows as delta shrinks; plot against delta with a negated guide
  // exponent so the line tracks the points.
  write_gnuplot_script(csv.path(),
                       ladder_plot_script(csv.path(), "mean steps", 2, 3, -report.slope,
                                          report.curve.front().delta,
                                          report.curve.front().mean_steps));
  std::printf("cost slope=%s ci=%s (%d paths) -> %s\n", CsvWriter::format(report.slope).c_str(),
              CsvWriter::format(report.slope_ci).c_str(), paths, csv.path().c_str());
}

void run_seminorm(const ExperimentConfig& config) {
  const SdeProblem& problem = require_problem(config, "seminorm");
  if (config.kappas.empty())
    throw ConfigError("seminorm requires a nonempty \"kappas\" list");

  const SmoothCoefficient* subtract =
      config.seminorm_subtract ? &*config.seminorm_subtract : nullptr;
  CsvWriter csv(default_or(config.output, "seminorm.csv"));
  csv.header({"kappa", "seminorm", "predicted_order"});
  for (double kappa : config.kappas) {
    const SeminormResult result =
        sobolev_seminorm(problem.drift, subtract, kappa, config.radius, config.resolution);
    const double order = predicted_order(kappa);
    csv.numeric_row({kappa, result.value, order});
    std::printf("kappa=%s seminorm=%s predicted_order=%s\n", CsvWriter::format(kappa).c_str(),
                CsvWriter::format(result.value).c_str(), CsvWriter::format(order).c_str());
  }
  csv.comment("radius=" + CsvWriter::format(config.radius) +
              ", resolution=" + std::to_string(config.resolution));
  csv.flush();

  std::string script;
  script += "set datafile separator ','\n";
  script += "set xlabel 'kappa'\n";
  script += "set ylabel 'seminorm'\n";
  script += "set y2label 'predicted order'\n";
  script += "set y2tics\n";
  script += "plot '" + csv.path() + "' skip 1 using 1:2 with linespoints title 'seminorm', \\\n";
  script += "     '" + csv.path() +
            "' skip 1 using 1:3 axes x1y2 with linespoints title 'predicted order'\n";
  write_gnuplot_script(csv.path(), script);
}

void run_rare_event(const ExperimentConfig& config) {
  const int paths = config.paths.value_or(10000);
  if (paths < 1000)
    throw ConfigError("rare-event fractions need at least 1000 paths to be meaningful");
  if (!(config.band > 0.0)) throw ConfigError("rare-event requires a positive band");
  double delta = 1.0 / 256.0;
  if (config.delta_ladder.size() == 1) delta = config.delta_ladder.front();
  else if (config.delta_ladder.size() > 1)
    throw ConfigError("rare-event takes at most one delta in delta_ladder");

  // Paired comparison on the same driving noise: drift pointing into the
  // breakpoint versus drift pointing away from it.
  const Preset* inward = find_preset("sign-inward");
  const Preset* outward = find_preset("sign-outward");
  const double f_in =
      hitting_fraction(inward->problem, delta, paths, config.band, config.seed, config.workers);
  const double f_out =
      hitting_fraction(outward->problem, delta, paths, config.band, config.seed, config.workers);

  std::printf("inward drift: hitting fraction %s\n", CsvWriter::format(f_in).c_str());
  std::printf("outward drift: hitting fraction %s\n", CsvWriter::format(f_out).c_str());
  std::printf("band=%s delta=%s paths=%d seed=%llu\n", CsvWriter::format(config.band).c_str(),
              CsvWriter::format(delta).c_str(), paths,
              static_cast<unsigned long long>(config.seed));

  if (!config.output.empty()) {
    CsvWriter csv(config.output);
    csv.header({"variant", "hitting_fraction"});
    csv.row({"inward", CsvWriter::format(f_in)});
    csv.row({"outward", CsvWriter::format(f_out)});
    csv.comment("band=" + CsvWriter::format(config.band) + ", delta=" + CsvWriter::format(delta) +
                ", paths=" + std::to_string(paths) + ", seed=" + std::to_string(config.seed));
    csv.flush();
  }
}

void run_presets_listing() {
  for (const Preset& preset : all_presets())
    std::printf("%-20s %s\n", preset.name.c_str(), preset.note.c_str());
}

}  // namespace disdrift
