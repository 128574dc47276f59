#pragma once
// Command-line front end: compiled-in problem presets, JSON experiment
// configuration, CSV emission (with companion gnuplot scripts), and the
// subcommand implementations. Every run is a pure function of
// (configuration, seed): repeated invocations produce byte-identical files.

#include <optional>
#include <string>
#include <vector>

#include "disdrift/analysis.hpp"
#include "disdrift/sde_core.hpp"

namespace disdrift {

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct Preset {
  std::string name;
  SdeProblem problem;
  // Smooth part subtracted before seminorm quadrature (b = drift - subtract);
  // unset for presets whose drift is measured as-is.
  std::optional<SmoothCoefficient> seminorm_subtract;
  std::string note;  // one-line description of what the preset exercises
};

const std::vector<Preset>& all_presets();
const Preset* find_preset(const std::string& name);  // null when unknown

// ---------------------------------------------------------------------------
// Experiment configuration (JSON)
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string problem_name;               // preset name; empty for inline problems
  std::optional<SdeProblem> problem;      // resolved problem (absent: rare-event)
  std::optional<SmoothCoefficient> seminorm_subtract;
  SchemeId scheme = SchemeId::Em;
  std::vector<double> delta_ladder;
  std::optional<int> paths;               // per-command default when unset
  std::uint64_t seed = 0;
  bool seed_set = false;                  // whether the config document gave a seed
  ReferencePolicy reference = ReferencePolicy::FineGrid;
  std::string output;                     // CSV path; per-command default when empty
  int workers = 1;
  double eps0 = 1.0;
  int ref_refine_log2 = 6;
  std::vector<double> kappas;             // seminorm exponents
  double radius = 10.0;                   // seminorm domain truncation
  int resolution = 2000;                  // seminorm quadrature size
  double band = 0.01;                     // rare-event band half-width
};

// Parses and validates a JSON configuration document. Unknown fields and
// malformed values are rejected with a message naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Seed precedence: --seed flag > config "seed" > DISDRIFT_SEED env > 0.
std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> flag_seed);

// ---------------------------------------------------------------------------
// CSV + gnuplot output
// ---------------------------------------------------------------------------

// Buffers rows and writes the whole file once on flush, so partially written
// files never appear. Numeric fields use "%.12g" with '.' decimals.
class CsvWriter {
 public:
  explicit CsvWriter(std::string path);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);
  void numeric_row(const std::vector<double>& values);
  void comment(const std::string& text);  // "# ..." footer line
  void flush();                           // throws ConfigError if unwritable
  const std::string& path() const { return path_; }

  static std::string format(double value);
  static std::string quote(const std::string& field);  // RFC-4180 quoting

 private:
  std::string path_;
  std::string buffer_;
};

// Writes `script` next to `csv_path` as "<csv_path>.gp".
void write_gnuplot_script(const std::string& csv_path, const std::string& script);

// ---------------------------------------------------------------------------
// Subcommands: validate, run, write outputs; throw ConfigError /
// NumericalError on failure (the CLI maps them to exit codes 1 / 2).
// ---------------------------------------------------------------------------

void run_simulate(const ExperimentConfig& config);
void run_estimate_order(const ExperimentConfig& config);
void run_adaptive_cost(const ExperimentConfig& config);
void run_seminorm(const ExperimentConfig& config);
void run_rare_event(const ExperimentConfig& config);
void run_presets_listing();

}  // namespace disdrift
