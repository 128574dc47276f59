#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "disdrift/cli.hpp"
#include "json.hpp"

namespace disdrift {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void require_keys(const json& j, const std::string& field,
                  const std::unordered_set<std::string>& allowed) {
  for (const auto& item : j.items())
    if (allowed.find(item.key()) == allowed.end())
      bad_field(field.empty() ? item.key() : field + "." + item.key(),
                "unknown field");
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    bad_field(field, "expected an integer");
  return j.get<int>();
}

std::vector<double> as_number_array(const json& j, const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) bad_field(field, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

SmoothCoefficient parse_coefficient(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    bad_field(field, "expected an object with a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") {
    require_keys(j, field, {"kind", "value"});
    if (!j.contains("value")) bad_field(field + ".value", "required");
    return SmoothCoefficient::constant(as_number(j["value"], field + ".value"));
  }
  if (kind == "affine") {
    require_keys(j, field, {"kind", "c0", "c1"});
    return SmoothCoefficient::affine(
        as_number(j.value("c0", json(0.0)), field + ".c0"),
        as_number(j.value("c1", json(0.0)), field + ".c1"));
  }
  if (kind == "polynomial") {
    require_keys(j, field, {"kind", "coeffs"});
    if (!j.contains("coeffs")) bad_field(field + ".coeffs", "required");
    return SmoothCoefficient::polynomial(
        as_number_array(j["coeffs"], field + ".coeffs"));
  }
  if (kind == "sine" || kind == "tanh") {
    require_keys(j, field, {"kind", "c0", "c1", "c2"});
    const double c0 = as_number(j.value("c0", json(0.0)), field + ".c0");
    const double c1 = as_number(j.value("c1", json(0.0)), field + ".c1");
    const double c2 = as_number(j.value("c2", json(0.0)), field + ".c2");
    return kind == "sine" ? SmoothCoefficient::sine(c0, c1, c2)
                          : SmoothCoefficient::tanh_shape(c0, c1, c2);
  }
  bad_field(field + ".kind",
            "must be one of constant, affine, polynomial, sine, tanh");
}

PiecewiseDrift parse_drift(const json& j, const std::string& field) {
  if (!j.is_object()) bad_field(field, "expected an object");
  require_keys(j, field, {"breakpoints", "pieces", "values"});
  std::vector<double> breakpoints;
  if (j.contains("breakpoints"))
    breakpoints = as_number_array(j["breakpoints"], field + ".breakpoints");
  if (!j.contains("pieces") || !j["pieces"].is_array())
    bad_field(field + ".pieces", "expected an array of coefficient arrays");
  std::vector<std::vector<double>> pieces;
  for (const auto& p : j["pieces"])
    pieces.push_back(as_number_array(p, field + ".pieces"));
  std::vector<double> values;
  if (j.contains("values")) values = as_number_array(j["values"], field + ".values");
  return PiecewiseDrift(std::move(breakpoints), std::move(pieces), std::move(values));
}

SdeProblem parse_problem(const json& j) {
  if (!j.is_object()) bad_field("problem", "expected a preset name or an object");
  require_keys(j, "problem",
               {"drift", "diffusion", "jump", "jump_rate", "initial", "horizon"});
  if (!j.contains("drift")) bad_field("problem.drift", "required");
  if (!j.contains("diffusion")) bad_field("problem.diffusion", "required");
  std::optional<SmoothCoefficient> jump;
  if (j.contains("jump"))
    jump = parse_coefficient(j["jump"], "problem.jump");
  SdeProblem p{parse_drift(j["drift"], "problem.drift"),
               parse_coefficient(j["diffusion"], "problem.diffusion"), std::move(jump),
               j.contains("jump_rate")
                   ? as_number(j["jump_rate"], "problem.jump_rate")
                   : 0.0,
               j.contains("initial") ? as_number(j["initial"], "problem.initial") : 0.0,
               j.contains("horizon") ? as_number(j["horizon"], "problem.horizon") : 1.0};
  p.validate();
  return p;
}

void validate_scheme_compatibility(const ExperimentConfig& c) {
  if (!c.problem) return;
  const bool has_jump = c.problem->jump_rate > 0.0 && c.problem->jump.has_value();
  if (c.scheme == SchemeId::JumpEm && !has_jump)
    throw ConfigError("the jump scheme requires a jump coefficient with positive rate");
  if (c.scheme != SchemeId::JumpEm && has_jump)
    throw ConfigError("this problem has jumps; only the jump scheme integrates them");
  if ((c.scheme == SchemeId::TransformEm || c.scheme == SchemeId::TransformMilstein) &&
      c.problem->drift.breakpoint_count() > 0 &&
      !c.problem->non_degenerate_at_breakpoints())
    throw ConfigError(
        "transform scheme requires nonzero diffusion at every drift breakpoint");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  require_keys(j, "",
               {"problem", "scheme", "delta_ladder", "paths", "seed", "reference",
                "output", "workers", "eps0", "ref_refine_log2", "kappas", "radius",
                "resolution", "band", "seminorm_subtract"});

  ExperimentConfig c;
  if (j.contains("problem")) {
    const json& p = j["problem"];
    if (p.is_string()) {
      c.problem_name = p.get<std::string>();
      const Preset* preset = find_preset(c.problem_name);
      if (!preset)
        throw ConfigError("config field 'problem': unknown preset '" +
                          c.problem_name + "' (see the presets subcommand)");
      c.problem = preset->problem;
      c.seminorm_subtract = preset->seminorm_subtract;
    } else {
      c.problem = parse_problem(p);
    }
  }
  if (j.contains("scheme")) {
    if (!j["scheme"].is_string()) bad_field("scheme", "expected a string");
    const auto id = scheme_from_name(j["scheme"].get<std::string>());
    if (!id)
      bad_field("scheme",
                "must be one of em, milstein, transform-em, transform-milstein, "
                "adaptive-em, jump-em");
    c.scheme = *id;
  }
  if (j.contains("delta_ladder")) {
    c.delta_ladder = as_number_array(j["delta_ladder"], "delta_ladder");
    for (std::size_t i = 0; i < c.delta_ladder.size(); ++i) {
      if (!(c.delta_ladder[i] > 0.0))
        bad_field("delta_ladder", "entries must be positive");
      if (i > 0 && !(c.delta_ladder[i] < c.delta_ladder[i - 1]))
        bad_field("delta_ladder", "entries must be strictly decreasing");
    }
  }
  if (j.contains("paths")) {
    const int m = as_int(j["paths"], "paths");
    if (m < 1) bad_field("paths", "must be positive");
    c.paths = m;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      bad_field("seed", "expected an unsigned integer");
    if (j["seed"].is_number_integer() && j["seed"].get<long long>() < 0)
      bad_field("seed", "must be nonnegative");
    c.seed = j["seed"].get<std::uint64_t>();
    c.seed_set = true;
  }
  if (j.contains("reference")) {
    if (!j["reference"].is_string()) bad_field("reference", "expected a string");
    const std::string r = j["reference"].get<std::string>();
    if (r == "exact")
      c.reference = ReferencePolicy::Exact;
    else if (r == "fine-grid")
      c.reference = ReferencePolicy::FineGrid;
    else
      bad_field("reference", "must be 'exact' or 'fine-grid'");
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) bad_field("output", "expected a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("workers")) {
    c.workers = as_int(j["workers"], "workers");
    if (c.workers < 1) bad_field("workers", "must be positive");
  }
  if (j.contains("eps0")) {
    c.eps0 = as_number(j["eps0"], "eps0");
    if (!(c.eps0 > 0.0)) bad_field("eps0", "must be positive");
  }
  if (j.contains("ref_refine_log2")) {
    c.ref_refine_log2 = as_int(j["ref_refine_log2"], "ref_refine_log2");
    if (c.ref_refine_log2 < 0 || c.ref_refine_log2 > 20)
      bad_field("ref_refine_log2", "must lie in [0, 20]");
  }
  if (j.contains("kappas")) c.kappas = as_number_array(j["kappas"], "kappas");
  if (j.contains("radius")) {
    c.radius = as_number(j["radius"], "radius");
    if (!(c.radius > 0.0)) bad_field("radius", "must be positive");
  }
  if (j.contains("resolution")) {
    c.resolution = as_int(j["resolution"], "resolution");
    if (c.resolution < 16) bad_field("resolution", "must be at least 16");
  }
  if (j.contains("band")) {
    c.band = as_number(j["band"], "band");
    if (!(c.band >= 0.0)) bad_field("band", "must be nonnegative");
  }
  if (j.contains("seminorm_subtract"))
    c.seminorm_subtract =
        parse_coefficient(j["seminorm_subtract"], "seminorm_subtract");

  validate_scheme_compatibility(c);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> flag_seed) {
  if (flag_seed) return *flag_seed;
  if (config.seed_set) return config.seed;
  if (const char* env = std::getenv("DISDRIFT_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw ConfigError("DISDRIFT_SEED must be an unsigned integer");
    return static_cast<std::uint64_t>(v);
  }
  return 0;
}

}  // namespace disdrift
