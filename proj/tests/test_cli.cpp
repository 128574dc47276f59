#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "disdrift/cli.hpp"
#include "doctest.h"

using namespace disdrift;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct EnvGuard {
  explicit EnvGuard(const char* name) : name_(name) { unsetenv(name); }
  ~EnvGuard() { unsetenv(name_); }
  void set(const char* value) { setenv(name_, value, 1); }
  const char* name_;
};

}  // namespace

TEST_CASE("presets: every entry is a valid problem with a note") {
  const auto& presets = all_presets();
  CHECK(presets.size() >= 8);
  for (const Preset& preset : presets) {
    CAPTURE(preset.name);
    CHECK(!preset.note.empty());
    CHECK_NOTHROW(preset.problem.validate());
    CHECK(find_preset(preset.name) == &preset);
  }
  CHECK(find_preset("no-such-preset") == nullptr);

  // The hitting-statistics pair really points in opposite directions.
  const Preset* in = find_preset("sign-inward");
  const Preset* out = find_preset("sign-outward");
  REQUIRE(in != nullptr);
  REQUIRE(out != nullptr);
  CHECK(in->problem.drift(0.05) < 0.0);
  CHECK(out->problem.drift(0.05) > 0.0);
  // And the decomposition preset carries its smooth subtrahend.
  const Preset* dec = find_preset("sign-decomposition");
  REQUIRE(dec != nullptr);
  CHECK(dec->seminorm_subtract.has_value());
}

TEST_CASE("config parsing: preset reference with overrides") {
  const ExperimentConfig cfg = parse_config(R"({
    "problem": "gbm",
    "scheme": "milstein",
    "delta_ladder": [0.25, 0.125, 0.0625, 0.03125],
    "paths": 500,
    "seed": 9,
    "reference": "exact",
    "workers": 3,
    "output": "out.csv"
  })");
  CHECK(cfg.problem_name == "gbm");
  REQUIRE(cfg.problem.has_value());
  CHECK(cfg.problem->initial == 1.0);
  CHECK(cfg.scheme == SchemeId::Milstein);
  CHECK(cfg.delta_ladder.size() == 4);
  CHECK(cfg.paths == 500);
  CHECK(cfg.seed == 9);
  CHECK(cfg.seed_set);
  CHECK(cfg.reference == ReferencePolicy::Exact);
  CHECK(cfg.workers == 3);
  CHECK(cfg.output == "out.csv");
  // Unset optionals keep their marker values.
  CHECK(!parse_config(R"({"problem": "gbm"})").paths.has_value());
  CHECK(!parse_config(R"({"problem": "gbm"})").seed_set);
}

TEST_CASE("config parsing: inline problem definition") {
  const ExperimentConfig cfg = parse_config(R"({
    "problem": {
      "drift": {"breakpoints": [0.0], "pieces": [[2.5], [-1.5]], "values": [0.5]},
      "diffusion": {"kind": "sine", "c0": 1.0, "c1": 0.2, "c2": 1.0},
      "initial": 1.0,
      "horizon": 1.0
    },
    "scheme": "transform-em",
    "delta_ladder": [0.0625, 0.03125, 0.015625, 0.0078125]
  })");
  REQUIRE(cfg.problem.has_value());
  CHECK(cfg.problem->drift(-1.0) == 2.5);
  CHECK(cfg.problem->drift(2.0) == -1.5);
  CHECK(cfg.problem->diffusion(0.0) == doctest::Approx(1.0));
  CHECK(cfg.scheme == SchemeId::TransformEm);

  const ExperimentConfig jump_cfg = parse_config(R"({
    "problem": {
      "drift": {"breakpoints": [0.0], "pieces": [[1.0], [-1.0]], "values": [0.0]},
      "diffusion": {"kind": "constant", "value": 1.0},
      "jump": {"kind": "constant", "value": 0.5},
      "jump_rate": 1.0,
      "initial": 0.1,
      "horizon": 1.0
    },
    "scheme": "jump-em",
    "delta_ladder": [0.125]
  })");
  CHECK(jump_cfg.problem->jump_rate == 1.0);
}

TEST_CASE("config parsing: malformed documents name the offending field") {
  auto message_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("(no error)");
  };

  CHECK(message_of(R"({"problem": "zzz"})").find("unknown preset") != std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "bogus": 1})").find("bogus") != std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "scheme": "rk4"})").find("scheme") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "seed": -3})").find("seed") != std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "delta_ladder": [0.1, 0.2]})").find("delta_ladder") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "delta_ladder": [0.0]})").find("delta_ladder") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "paths": 0})").find("paths") != std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "workers": 0})").find("workers") != std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "reference": "oracle"})").find("reference") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "eps0": 0})").find("eps0") != std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "resolution": 4})").find("resolution") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "gbm", "band": -1})").find("band") != std::string::npos);
  CHECK(message_of("{not json").find("config") != std::string::npos);
  CHECK(message_of(R"({"problem": {"diffusion": {"kind": "constant", "value": 1.0},
                     "initial": 0.0, "horizon": 1.0}})")
            .find("drift") != std::string::npos);
  CHECK(message_of(R"({"problem": {"drift": {"pieces": [[1.0]]},
                     "diffusion": {"kind": "warp", "value": 1.0},
                     "initial": 0.0, "horizon": 1.0}})")
            .find("kind") != std::string::npos);

  // Scheme/problem compatibility is checked at parse time.
  CHECK(message_of(R"({"problem": "gbm", "scheme": "jump-em"})").find("jump") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "sign-jump", "scheme": "em"})").find("jump") !=
        std::string::npos);
}

TEST_CASE("seed resolution: flag beats config beats environment") {
  EnvGuard env("DISDRIFT_SEED");

  ExperimentConfig with_seed;
  with_seed.seed = 11;
  with_seed.seed_set = true;
  ExperimentConfig without_seed;

  CHECK(resolve_seed(with_seed, 99) == 99);
  CHECK(resolve_seed(with_seed, std::nullopt) == 11);
  CHECK(resolve_seed(without_seed, std::nullopt) == 0);

  env.set("123");
  CHECK(resolve_seed(without_seed, std::nullopt) == 123);
  CHECK(resolve_seed(with_seed, std::nullopt) == 11);
  CHECK(resolve_seed(without_seed, 7) == 7);

  env.set("12abc");
  CHECK_THROWS_AS(resolve_seed(without_seed, std::nullopt), ConfigError);
  env.set("");
  CHECK_THROWS_AS(resolve_seed(without_seed, std::nullopt), ConfigError);
}

TEST_CASE("csv writer: formatting, quoting, deterministic bytes") {
  CHECK(CsvWriter::format(0.1) == "0.1");
  CHECK(CsvWriter::format(1.0) == "1");
  CHECK(CsvWriter::format(1.0 / 3.0) == "0.333333333333");
  CHECK(CsvWriter::format(1e-9) == "1e-09");
  CHECK(CsvWriter::format(-0.0078125) == "-0.0078125");

  CHECK(CsvWriter::quote("plain") == "plain");
  CHECK(CsvWriter::quote("with,comma") == "\"with,comma\"");
  CHECK(CsvWriter::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(CsvWriter::quote("line\nbreak") == "\"line\nbreak\"");

  const std::string path = temp_path("disdrift_csv_test.csv");
  CsvWriter csv(path);
  csv.header({"a", "b"});
  csv.numeric_row({0.5, 2.0});
  csv.row({"x,y", "2"});
  csv.comment("slope=1");
  csv.flush();
  CHECK(slurp(path) == "a,b\n0.5,2\n\"x,y\",2\n# slope=1\n");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(
      [] {
        CsvWriter bad("/no-such-directory/impossible.csv");
        bad.header({"a"});
        bad.flush();
      }(),
      ConfigError);
}

TEST_CASE("subcommands: deterministic files and exact ODE output") {
  const std::string out = temp_path("disdrift_sim_test.csv");
  ExperimentConfig cfg = parse_config(R"({
    "problem": "ode-only",
    "scheme": "em",
    "delta_ladder": [0.25],
    "paths": 1,
    "output": "PLACEHOLDER"
  })");
  cfg.output = out;
  run_simulate(cfg);
  // dx = -1.5 dt from 1: nodes at multiples of 1/4 are exact dyadics.
  CHECK(slurp(out) ==
        "path_id,t,x\n"
        "0,0,1\n"
        "0,0.25,0.625\n"
        "0,0.5,0.25\n"
        "0,0.75,-0.125\n"
        "0,1,-0.5\n");
  CHECK(std::filesystem::exists(out + ".gp"));

  // Same config, same bytes.
  const std::string again = temp_path("disdrift_sim_test2.csv");
  cfg.output = again;
  run_simulate(cfg);
  CHECK(slurp(again) == slurp(out));
  std::filesystem::remove(out);
  std::filesystem::remove(out + ".gp");
  std::filesystem::remove(again);
  std::filesystem::remove(again + ".gp");

  // simulate needs exactly one delta.
  ExperimentConfig two = cfg;
  two.delta_ladder = {0.25, 0.125};
  CHECK_THROWS_AS(run_simulate(two), ConfigError);

  // estimate-order insists on a regression-worthy ladder.
  ExperimentConfig short_ladder = cfg;
  short_ladder.delta_ladder = {0.25, 0.125};
  CHECK_THROWS_AS(run_estimate_order(short_ladder), ConfigError);

  // adaptive-cost rejects non-adaptive schemes.
  ExperimentConfig wrong_scheme = cfg;
  wrong_scheme.delta_ladder = {0.25, 0.125, 0.0625, 0.03125};
  CHECK_THROWS_AS(run_adaptive_cost(wrong_scheme), ConfigError);

  // seminorm needs kappas.
  ExperimentConfig no_kappas = cfg;
  CHECK_THROWS_AS(run_seminorm(no_kappas), ConfigError);

  // rare-event refuses tiny samples.
  ExperimentConfig tiny = cfg;
  tiny.paths = 10;
  CHECK_THROWS_AS(run_rare_event(tiny), ConfigError);
}

TEST_CASE("estimate-order subcommand writes the slope footer") {
  const std::string out = temp_path("disdrift_order_test.csv");
  ExperimentConfig cfg = parse_config(R"({
    "problem": "gbm",
    "scheme": "em",
    "delta_ladder": [0.25, 0.125, 0.0625, 0.03125],
    "paths": 300,
    "reference": "exact",
    "seed": 1
  })");
  cfg.output = out;
  run_estimate_order(cfg);
  const std::string text = slurp(out);
  CHECK(text.find("delta,rmse,stderr\n") == 0);
  CHECK(text.find("# slope=") != std::string::npos);
  CHECK(text.find("ci=") != std::string::npos);
  CHECK(slurp(out + ".gp").find("logscale xy 2") != std::string::npos);
  std::filesystem::remove(out);
  std::filesystem::remove(out + ".gp");
}

TEST_CASE("config file loading") {
  const std::string path = temp_path("disdrift_cfg_test.json");
  {
    std::ofstream out(path);
    out << R"({"problem": "constant", "delta_ladder": [0.5]})";
  }
  const ExperimentConfig cfg = load_config_file(path);
  CHECK(cfg.problem_name == "constant");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config_file(path), ConfigError);
}
