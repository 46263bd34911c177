#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"
#include "vapordet/constants.hpp"
#include "vapordet/detector_model.hpp"
#include "vapordet/error.hpp"

using namespace vapordet;
using testing::rel;

namespace {

void check_against(const DetectorDesign& d, const nlohmann::json& g) {
  const auto r = budget_report(d);
  CHECK(rel(r.tau_col, g["tau_col"]) < 1e-12);
  CHECK(rel(r.l_abs, g["l_abs"]) < 1e-12);
  CHECK(rel(r.t_ro, g["t_ro"]) < 1e-12);
  CHECK(rel(r.zeeman_detuning, g["zeeman_detuning"]) < 1e-12);
  CHECK(rel(r.p_dc, g["p_dc"]) < 1e-12);
  CHECK(rel(r.budget.loss_scatter, g["loss_scatter"]) < 1e-12);
  CHECK(rel(r.budget.loss_transmission, g["loss_transmission"]) < 1e-12);
  CHECK(rel(r.budget.loss_collision, g["loss_collision"]) < 1e-12);
  CHECK(rel(r.budget.eta, g["eta"]) < 1e-12);
  CHECK(r.atom_count == g["atom_count"].get<double>());
  CHECK(rel(r.net_dark.linear, g["net_dark_linear"]) < 1e-12);
  CHECK(rel(r.net_dark.exact, g["net_dark_exact"]) < 1e-10);
}

}  // namespace

TEST_CASE("worked design matches the independent oracle, both conventions") {
  const auto g = testing::golden();
  check_against(worked_design(FrequencyConvention::ordinary), g["ordinary"]);
  check_against(worked_design(FrequencyConvention::angular), g["angular"]);
}

TEST_CASE("collision time") {
  auto d = worked_design();
  d.temperature = 1e-3;
  d.n_density = 1e15;
  const PhysicalConstants c;
  const double hand = std::sqrt(d.species.mass / (3 * c.k_B * 1e-3)) / (1e15 * 1e-18);
  CHECK(rel(collision_time(d), hand) < 1e-14);
  const double t0 = collision_time(d);
  d.n_density *= 2;
  CHECK(rel(collision_time(d), t0 / 2) < 1e-14);
  d.n_density /= 2;
  d.temperature *= 4;
  CHECK(rel(collision_time(d), t0 / 2) < 1e-14);
}

TEST_CASE("absorption length scalings") {
  auto d = worked_design();
  const double l0 = absorption_length(d);
  d.detuning *= 2;
  CHECK(rel(absorption_length(d), 4 * l0) < 1e-14);
  d = worked_design();
  d.omega_e *= 2;
  CHECK(rel(absorption_length(d), l0 / 4) < 1e-14);
  d.omega_e = 0;
  CHECK(std::isinf(absorption_length(d)));
}

TEST_CASE("readout time") {
  auto d = worked_design();
  const double A = d.species.A_24;
  CHECK(rel(readout_time(d), A / (d.omega_r * d.omega_r * d.eta_det)) < 1e-3);
  const double t0 = readout_time(d);
  d.eta_det /= 2;
  CHECK(rel(readout_time(d), 2 * t0) < 1e-14);
  // monotone approach to 2 / (A_24 eta_det) as omega_r grows
  d = worked_design();
  double prev = std::numeric_limits<double>::infinity();
  for (double w = 0.01; w < 1e4; w *= 3) {
    d.omega_r = w * A;
    const double t = readout_time(d);
    CHECK(t < prev);
    CHECK(t > 2 / (A * d.eta_det));
    prev = t;
  }
  CHECK(rel(prev, 2 / (A * d.eta_det)) < 1e-6);
  d.omega_r = 0;
  CHECK_THROWS_AS(readout_time(d), DomainError);
}

TEST_CASE("zeeman detuning") {
  auto d = worked_design();
  CHECK(zeeman_detuning(d) == doctest::Approx(9.33e9).epsilon(1e-3));
  const PhysicalConstants c;
  CHECK(rel(zeeman_detuning(d), 2.0 / 3.0 * 1.39962449361e10) < 1e-9);
  CHECK(rel(zeeman_detuning(d, FrequencyConvention::angular), 2 * c.mu_B / (3 * c.hbar)) < 1e-14);
  const double z1 = zeeman_detuning(d);
  d.B_field = 2.5;
  CHECK(rel(zeeman_detuning(d), 2.5 * z1) < 1e-14);
  d.B_field = 0;
  CHECK(zeeman_detuning(d) == 0.0);
}

TEST_CASE("dark count probability") {
  auto d = worked_design();
  const double p = dark_count_prob(d);
  CHECK(p > 1e-5);
  CHECK(p < 4e-5);
  d.B_field = 0;
  CHECK(rel(dark_count_prob(d), readout_time(d) * d.species.A_24 / 2) < 1e-14);
  double prev = dark_count_prob(d);
  for (double B = 0.01; B <= 100; B *= 2) {
    d.B_field = B;
    const double q = dark_count_prob(d);
    CHECK(q < prev);
    prev = q;
  }
  CHECK(prev < 1e-3 * p);
}

TEST_CASE("atom count") {
  auto d = worked_design();
  CHECK(atom_count(d) == 20000.0);
  d.cell_length *= 2;
  CHECK(atom_count(d) == 40000.0);
  d.beam_area = 0;
  CHECK(atom_count(d) == 0.0);
}

TEST_CASE("net dark count") {
  const auto r = net_dark_count(20000, 2e-5);
  CHECK(r.linear == 0.4);
  CHECK(std::abs(r.exact - (1 - std::pow(1 - 2e-5, 20000))) < 1e-12);
  CHECK(std::abs(r.exact - testing::golden()["dark_pair_2e-5"]["exact"].get<double>()) < 1e-12);
  CHECK(r.exact == doctest::Approx(0.3297).epsilon(1e-3));
  const auto z = net_dark_count(20000, 0.0);
  CHECK(z.linear == 0.0);
  CHECK(z.exact == 0.0);
  // exact <= linear; within 1% when N P_dc < 0.02
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lp(-9, -1), ln(0, 6);
  for (int k = 0; k < 2000; ++k) {
    const double p = std::pow(10.0, lp(rng));
    const double n = std::round(std::pow(10.0, ln(rng)));
    const auto x = net_dark_count(n, p);
    CHECK(x.exact <= x.linear * (1 + 1e-15));
    CHECK(std::abs(x.exact - static_cast<double>(1.0L - std::pow(1.0L - p, static_cast<long double>(n)))) < 1e-12);
    if (n * p < 0.02) CHECK(x.exact > 0.99 * x.linear);
  }
}

TEST_CASE("scatter loss") {
  auto d = worked_design();
  CHECK(rel(scatter_loss(d), testing::golden()["ordinary"]["loss_scatter"]) < 1e-12);
  const double s0 = scatter_loss(d);
  d.detuning *= 4;
  CHECK(rel(scatter_loss(d), s0 / 256) < 1e-13);
  d.omega_e = 0;
  CHECK(scatter_loss(d) == 0.0);
}

TEST_CASE("efficiency budget limits") {
  auto d = worked_design();
  d.passes = 10000000;
  d.temperature = 1e-9;  // long collision time
  d.eta_up = 0.9;
  auto b = efficiency_budget(d);
  CHECK(b.loss_transmission < 1e-6);
  CHECK(b.eta == doctest::Approx(0.9).epsilon(1e-5));

  d = worked_design();
  d.omega_e = 0;
  b = efficiency_budget(d);
  CHECK(b.loss_scatter == 0.0);
  CHECK(b.loss_transmission == 1.0);
  CHECK(b.eta < 1e-5);
  CHECK(b.eta >= 0.0);
}

TEST_CASE("clamp flag") {
  auto d = worked_design();
  d.n_density = 1e22;  // collision loss beyond 1
  const auto b = efficiency_budget(d);
  CHECK(b.clamped);
  CHECK(b.eta == 0.0);
  CHECK(b.loss_collision > 1.0);
}

TEST_CASE("budget monotonicity properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> f(0.5, 2.0);
  for (int k = 0; k < 200; ++k) {
    auto d = worked_design();
    d.n_density *= f(rng);
    d.detuning *= f(rng);
    d.omega_e *= f(rng);
    d.pulse_duration *= f(rng);
    const auto b0 = efficiency_budget(d);
    auto up = [&](auto mutate) {
      auto e = d;
      mutate(e);
      return efficiency_budget(e);
    };
    const auto bq = up([](DetectorDesign& e) { e.passes += 10; });
    CHECK(bq.eta >= b0.eta);
    CHECK(bq.loss_transmission < b0.loss_transmission);
    CHECK(up([](DetectorDesign& e) { e.n_density *= 1.1; }).loss_transmission < b0.loss_transmission);
    CHECK(up([](DetectorDesign& e) { e.omega_e *= 1.1; }).loss_transmission < b0.loss_transmission);
    CHECK(up([](DetectorDesign& e) { e.pulse_duration *= 1.1; }).loss_transmission < b0.loss_transmission);
    CHECK(up([](DetectorDesign& e) { e.omega_e *= 1.1; }).loss_scatter > b0.loss_scatter);
    CHECK(up([](DetectorDesign& e) { e.detuning *= 1.1; }).loss_scatter < b0.loss_scatter);
    const auto r = budget_report(d);
    CHECK(std::isfinite(r.budget.eta));
    CHECK(r.budget.loss_scatter >= 0);
    CHECK(r.budget.loss_transmission >= 0);
    CHECK(r.budget.loss_collision >= 0);
  }
}

TEST_CASE("budget json") {
  const auto j = to_json(budget_report(worked_design()));
  CHECK(j["atom_count"] == 20000.0);
  CHECK(j["net_dark_count"]["linear"].get<double>() == j["atom_count"].get<double>() * j["p_dc"].get<double>());
  CHECK(j["validity"].contains("clamped"));
  CHECK(j["validity"]["far_detuned"] == true);
}
