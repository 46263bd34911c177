#include <doctest.h>

#include "support.hpp"
#include "vapordet/constants.hpp"
#include "vapordet/design.hpp"
#include "vapordet/error.hpp"
#include "vapordet/species.hpp"

using namespace vapordet;

TEST_CASE("physical constants are consistent") {
  const PhysicalConstants c;
  CHECK(c.k_B > 0);
  CHECK(c.mu_B > 0);
  CHECK(c.eps_0 > 0);
  CHECK(testing::rel(c.h, 2 * 3.14159265358979323846 * c.hbar) < 1e-12);
}

TEST_CASE("cesium preset") {
  const auto cs = cesium_preset();
  CHECK(cs.sigma_col == 1e-18);
  CHECK(cs.mass == doctest::Approx(2.207e-25).epsilon(1e-3));
  CHECK(cs.A_31 > 0);
  CHECK(cs.A_31 < 1e9);
  CHECK(cs.A_24 > 0);
  CHECK(cs.lambda_31 > cs.lambda_24);
  CHECK(cs == cesium_preset());
  // 1e-18 m^2 in cm^2
  CHECK(testing::rel(cs.sigma_col / units::cm2, 1e-14) < 1e-9);
  // against the golden oracle values
  const auto g = testing::golden()["species"];
  CHECK(testing::rel(cs.mass, g["mass"]) < 1e-12);
  CHECK(testing::rel(cs.A_31, g["A31"]) < 1e-12);
  CHECK(testing::rel(cs.A_24, g["A24"]) < 1e-12);
}

TEST_CASE("species json round trip and validation") {
  const auto cs = cesium_preset();
  CHECK(species_from_json(species_to_json(cs)) == cs);
  CHECK(species_from_json(nlohmann::json("cesium")) == cs);
  CHECK_THROWS_AS(species_preset("unobtainium"), ConfigError);
  auto j = species_to_json(cs);
  j["A_31"] = -1.0;
  CHECK_THROWS_AS(species_from_json(j), ConfigError);
}

TEST_CASE("validate_units") {
  CHECK(validate_units(worked_design()).empty());
  CHECK(validate_units(worked_design(FrequencyConvention::angular)).empty());

  auto d = worked_design();
  d.cell_length = 0.0;
  auto v = validate_units(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "cell_length");

  d = worked_design();
  d.temperature = -1.0;
  v = validate_units(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "temperature");

  d = worked_design();
  d.eta_det = 1.5;
  d.n_density = std::nan("");
  CHECK(validate_units(d).size() == 2);
}

TEST_CASE("far-detuning flag") {
  auto d = worked_design();
  CHECK(far_detuned(d));
  d.detuning = 5 * d.omega_e;
  CHECK_FALSE(far_detuned(d));
}

TEST_CASE("field access") {
  auto d = worked_design();
  for (const auto& f : design_field_names()) {
    CHECK(is_design_field(f));
    CHECK_FALSE(field_unit(f).empty());
    const double v = get_field(d, f);
    set_field(d, f, v);
    CHECK(get_field(d, f) == v);
  }
  CHECK_THROWS_AS(get_field(d, "colour"), ConfigError);
  set_field(d, "passes", 12.6);
  CHECK(d.passes == 13);
}

TEST_CASE("design json: lab units convert at ingest") {
  const auto j = nlohmann::json::parse(R"({
    "species": "cesium", "frequency_convention": "ordinary",
    "n_density_cm3": 1e9, "temperature_mK": 1.0, "cell_length_mm": 2.0,
    "beam_area_mm2": 0.01, "passes": 100, "B_field_T": 1.0,
    "pulse_duration_ns": 10.0, "omega_e_per_A31": 1.0, "detuning_GHz": 0.5,
    "omega_r_per_A24": 0.01, "eta_det": 0.125 })");
  const auto d = design_from_json(j);
  const auto p = worked_design();
  for (const auto& f : design_field_names()) CHECK(get_field(d, f) == doctest::Approx(get_field(p, f)).epsilon(1e-14));

  auto a = j;
  a["frequency_convention"] = "angular";
  CHECK(design_from_json(a).detuning == doctest::Approx(2 * 3.141592653589793 * 0.5e9));

  CHECK(design_from_json(design_to_json(p)).n_density == p.n_density);
  CHECK(design_from_json(nlohmann::json{{"preset", "worked"}}).passes == 100);

  auto bad = j;
  bad["colour"] = 3;
  CHECK_THROWS_AS(design_from_json(bad), ConfigError);
  auto dup = j;
  dup["n_density"] = 1e15;
  CHECK_THROWS_AS(design_from_json(dup), ConfigError);
  auto missing = j;
  missing.erase("eta_det");
  CHECK_THROWS_AS(design_from_json(missing), ConfigError);
  auto conv = j;
  conv["frequency_convention"] = "radians";
  CHECK_THROWS_AS(design_from_json(conv), ConfigError);
}
