#include <doctest.h>

#include <cstring>
#include <string>

#include "support.hpp"
#include "vapordet/vapordet.h"

TEST_CASE("c api: design handle and budget") {
  vd_design* d = nullptr;
  REQUIRE(vd_design_worked(VD_ORDINARY, &d) == VD_OK);
  vd_budget b{};
  REQUIRE(vd_budget_eval(d, &b) == VD_OK);
  CHECK(b.atom_count == 20000.0);
  CHECK(b.net_dark_linear == b.atom_count * b.p_dc);
  CHECK(b.far_detuned == 1);

  double v = 0;
  CHECK(vd_design_get(d, "passes", &v) == VD_OK);
  CHECK(v == 100.0);
  CHECK(vd_design_set(d, "passes", 200) == VD_OK);
  vd_budget b2{};
  vd_budget_eval(d, &b2);
  CHECK(b2.eta > b.eta);

  CHECK(vd_design_get(d, "colour", &v) == VD_ERR_CONFIG);
  CHECK(std::strlen(vd_last_error()) > 0);
  CHECK(vd_design_get(d, "passes", &v) == VD_OK);
  CHECK(std::strlen(vd_last_error()) == 0);

  size_t n = 99;
  CHECK(vd_design_validate(d, &n) == VD_OK);
  CHECK(n == 0);
  vd_design_set(d, "cell_length", 0.0);
  vd_design_validate(d, &n);
  CHECK(n == 1);

  const char* js = nullptr;
  REQUIRE(vd_design_to_json(d, &js) == VD_OK);
  vd_design* e = nullptr;
  REQUIRE(vd_design_from_json(js, &e) == VD_OK);
  vd_design_get(e, "passes", &v);
  CHECK(v == 200.0);
  CHECK(vd_design_from_json("{", &e) == VD_ERR_CONFIG);
  vd_design_free(e);
  vd_design_free(d);
  CHECK(vd_budget_eval(nullptr, &b) == VD_ERR_DOMAIN);
}

TEST_CASE("c api: dynamics and readout") {
  vd_design* d = nullptr;
  vd_design_worked(VD_ORDINARY, &d);
  double phi = 0;
  REQUIRE(vd_photon_drive(d, &phi) == VD_OK);
  vd_absorption a{}, n{};
  REQUIRE(vd_markov_square(d, phi, &a) == VD_OK);
  REQUIRE(vd_markov_numeric(d, phi, 0, 0, &n) == VD_OK);
  CHECK(std::abs(a.p_absorb - n.p_absorb) <= 1e-8 * a.p_absorb);
  vd_readout_chain c{};
  CHECK(vd_readout_chain_eval(d, 0.0, &c) == VD_ERR_DOMAIN);
  vd_budget b{};
  vd_budget_eval(d, &b);
  REQUIRE(vd_readout_chain_eval(d, b.t_ro, &c) == VD_OK);
  CHECK(c.atoms == 20000);
  vd_design_free(d);
}

TEST_CASE("c api: command runs") {
  const std::string cfg = testing::slurp(std::string(VAPORDET_SOURCE_DIR) + "/configs/worked-design.json");
  vd_run_options o{1, 7, VD_FORMAT_CSV, nullptr};
  vd_run* r = nullptr;
  REQUIRE(vd_run_command("budget", cfg.c_str(), &o, &r) == VD_OK);
  CHECK(std::string(vd_run_summary(r)).find("20000") != std::string::npos);
  REQUIRE(vd_run_file_count(r) == 1);
  CHECK(std::string(vd_run_file_name(r, 0)) == "budget.csv");
  size_t size = 0;
  const char* data = vd_run_file_data(r, 0, &size);
  CHECK(std::string(data, size).find("seed=7") != std::string::npos);
  CHECK(std::string(vd_run_output_dir(r)) == "out/worked-design");
  CHECK(vd_run_file_name(r, 5) == nullptr);
  vd_run_free(r);

  CHECK(vd_run_command("budget", "{\"design\": ", &o, &r) == VD_ERR_CONFIG);
  CHECK(r == nullptr);
  CHECK(std::string(vd_last_error()).find("line 1") != std::string::npos);
  CHECK(vd_run_command("fly", cfg.c_str(), &o, &r) == VD_ERR_CONFIG);

  std::string infeasible = cfg;
  infeasible.replace(infeasible.find("\"budget\": 0.2"), 13, "\"budget\": 1e-12");
  CHECK(vd_run_command("optimize", infeasible.c_str(), &o, &r) == VD_ERR_INFEASIBLE);
  o.format = static_cast<vd_format>(9);
  CHECK(vd_run_command("budget", cfg.c_str(), &o, &r) == VD_ERR_CONFIG);
  CHECK(std::string(vd_version()) == "0.1.0");
}
