#include <doctest.h>

#include <string>

#include "support.hpp"
#include "vapordet/app.hpp"
#include "vapordet/error.hpp"

using namespace vapordet;
using nlohmann::json;

namespace {

std::string worked_config() { return testing::slurp(std::string(VAPORDET_SOURCE_DIR) + "/configs/worked-design.json"); }

RunConfig with(const std::string& block, const json& value) {
  auto j = json::parse(worked_config());
  j[block] = value;
  return parse_config(j.dump(), {}, std::string(VAPORDET_SOURCE_DIR) + "/configs");
}

const OutputFile& file(const CommandOutput& o, const std::string& name) {
  for (const auto& f : o.files)
    if (f.name == name) return f;
  FAIL("missing output " << name);
  throw 0;
}

}  // namespace

TEST_CASE("config parse errors name line and column") {
  const std::string bad = "{\n  \"design\": {\n    \"preset\": \"worked\",,\n  }\n}";
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3, column") != std::string::npos);
  }
}

TEST_CASE("config validation rejects bad designs field by field") {
  try {
    parse_config(R"({"design": {"preset": "worked", "cell_length_mm": 0, "temperature_mK": -1}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    CHECK(m.find("cell_length") != std::string::npos);
    CHECK(m.find("temperature") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"design": {"preset": "worked"}, "sweeep": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
}

TEST_CASE("species file is resolved against the config directory") {
  const auto cfg = parse_config(R"({"design": {"preset": "worked", "species_file": "cesium.json"}})", {},
                                std::string(VAPORDET_SOURCE_DIR) + "/configs");
  CHECK(cfg.design.species.name == "cesium");
  CHECK_THROWS_AS(parse_config(R"({"design": {"preset": "worked", "species_file": "nope.json"}})"), ConfigError);
}

TEST_CASE("seed override and hashing") {
  const auto a = parse_config(worked_config());
  const auto b = parse_config(worked_config(), 99);
  CHECK(a.seed == 1);
  CHECK(b.seed == 99);
  CHECK(b.raw["seed"] == 99);
  CHECK(config_hash(a.raw) != config_hash(b.raw));
  CHECK(config_hash(a.raw) == config_hash(parse_config(worked_config()).raw));
  CHECK(config_hash(a.raw).size() == 16);
}

TEST_CASE("budget command") {
  const auto cfg = parse_config(worked_config());
  const auto out = cmd_budget(cfg, OutputFormat::both);
  CHECK(out.summary.find("20000") != std::string::npos);
  const auto j = json::parse(file(out, "budget.json").content);
  CHECK(j["atom_count"] == 20000.0);
  CHECK(j["net_dark_count"]["linear"].get<double>() == j["atom_count"].get<double>() * j["p_dc"].get<double>());
  CHECK(j["meta"]["version"] == std::string(kVersion));
  CHECK(file(out, "budget.csv").content.rfind("# vapordet 0.1.0 command=budget seed=1 config_hash=", 0) == 0);
  CHECK(cmd_budget(cfg, OutputFormat::json).files.size() == 1);
}

TEST_CASE("dynamics command") {
  const auto out = run_command("dynamics", with("dynamics", json::object()), OutputFormat::both);
  const auto j = json::parse(file(out, "dynamics.json").content);
  CHECK(j["agreement"].get<double>() <= 1e-8);
  CHECK_FALSE(j.contains("oracle"));

  auto zero = json::parse(worked_config());
  zero["design"]["omega_e_per_A31"] = 0.0;
  zero.erase("dynamics");
  const auto z = run_command("dynamics", parse_config(zero.dump()), OutputFormat::json);
  CHECK(json::parse(z.files[0].content)["numeric"]["p_absorb"] == 0.0);

  const auto o = run_command("dynamics", parse_config(worked_config()), OutputFormat::both);
  const auto jo = json::parse(file(o, "dynamics.json").content);
  CHECK(jo["oracle"]["conservation_drift"].get<double>() <= 1e-9);
  CHECK(file(o, "oracle_trajectory.csv").content.find("total_excitation") != std::string::npos);

  const auto sampled = run_command(
      "dynamics", with("dynamics", {{"photon", {{"kind", "sampled"}, {"duration_ns", 10}, {"samples", {0, 1, 0}}}}}),
      OutputFormat::json);
  CHECK(json::parse(sampled.files[0].content)["closed_form"].is_null());
  CHECK_THROWS_AS(run_command("dynamics", with("dynamics", {{"photon", {{"kind", "gaussian"}}}}), OutputFormat::json),
                  ConfigError);
}

TEST_CASE("mc command is deterministic") {
  const json mc = {{"n_photons", 3}, {"readout_duration_tro", 2.0}, {"trials", 5000},
                   {"confusion", {{"n_min", 0}, {"n_max", 3}}}, {"write_trials", true}};
  const auto cfg = with("mc", mc);
  const auto a = run_command("mc", cfg, OutputFormat::both);
  const auto b = run_command("mc", cfg, OutputFormat::both);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) CHECK(a.files[k].content == b.files[k].content);
  auto other = json::parse(cfg.raw.dump());
  const auto c = run_command("mc", parse_config(other.dump(), 2), OutputFormat::csv);
  CHECK(file(c, "mc_trials.csv").content != file(a, "mc_trials.csv").content);
  CHECK_THROWS_AS(run_command("mc", with("mc", {{"trials", 10}}), OutputFormat::json), ConfigError);
}

TEST_CASE("sweep command") {
  const auto out = run_command("sweep", parse_config(worked_config()), OutputFormat::both);
  CHECK(json::parse(file(out, "sweep.json").content)["rows"].size() == 40);
  const json empty_values = {{"axes", {{{"field", "passes"}, {"values", json::array()}}}}};
  CHECK_THROWS_AS(run_command("sweep", with("sweep", empty_values), OutputFormat::csv), ConfigError);
  const json zero_count = {{"axes", {{{"field", "passes"}, {"from", 1}, {"to", 2}, {"count", 0}}}}};
  CHECK_THROWS_AS(run_command("sweep", with("sweep", zero_count), OutputFormat::csv), ConfigError);
  const json no_axes = {{"axes", json::array()}};
  CHECK_THROWS_AS(run_command("sweep", with("sweep", no_axes), OutputFormat::csv), ConfigError);
  const json all = {{"axes", {{{"field", "passes"}, {"values", {1, 2}}}}}};
  const auto csv = file(run_command("sweep", with("sweep", all), OutputFormat::csv), "sweep.csv").content;
  CHECK(csv.find("net_dark_exact") != std::string::npos);
}

TEST_CASE("optimize command") {
  const auto a = run_command("optimize", parse_config(worked_config()), OutputFormat::both);
  const auto b = run_command("optimize", parse_config(worked_config()), OutputFormat::both);
  for (std::size_t k = 0; k < a.files.size(); ++k) CHECK(a.files[k].content == b.files[k].content);
  const auto j = json::parse(file(a, "optimize.json").content);
  CHECK(j["best"]["feasible"] == true);
  CHECK(file(a, "trace.jsonl").content.rfind("{\"meta\":", 0) == 0);

  auto infeasible = json::parse(worked_config())["optimize"];
  infeasible["budget"] = 1e-12;
  try {
    run_command("optimize", with("optimize", infeasible), OutputFormat::json);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
  }
}

TEST_CASE("outputs embed their config and reproduce from it") {
  const auto cfg = parse_config(worked_config(), 5);
  for (const char* cmd : {"budget", "mc", "sweep"}) {
    const auto out = run_command(cmd, cfg, OutputFormat::both);
    for (const auto& f : out.files) {
      const bool csv = f.name.ends_with(".csv");
      std::string embedded;
      if (csv) {
        const auto pos = f.content.find("# config=");
        REQUIRE(pos != std::string::npos);
        embedded = f.content.substr(pos + 9, f.content.find('\n', pos) - pos - 9);
        CHECK(f.content.find("seed=5") != std::string::npos);
      } else {
        const auto j = json::parse(f.content);
        CHECK(j["meta"]["seed"] == 5);
        CHECK(j["meta"]["config_hash"] == config_hash(cfg.raw));
        embedded = j["meta"]["config"].dump();
      }
      const auto again = run_command(cmd, parse_config(embedded), OutputFormat::both);
      bool found = false;
      for (const auto& g : again.files)
        if (g.name == f.name) {
          found = true;
          CHECK(g.content == f.content);
        }
      CHECK(found);
    }
  }
  CHECK_THROWS_AS(run_command("plot", cfg, OutputFormat::json), ConfigError);
}
