#include "vapordet/vapordet.h"

#include <memory>
#include <string>

#include "vapordet/app.hpp"
#include "vapordet/detector_model.hpp"
#include "vapordet/dynamics.hpp"
#include "vapordet/error.hpp"
#include "vapordet/readout_mc.hpp"

struct vd_design {
  vapordet::DetectorDesign d;
};

struct vd_run {
  vapordet::CommandOutput out;
  std::string output_dir;
};

namespace {

thread_local std::string last_error;
thread_local std::string scratch;

template <class F>
vd_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return VD_OK;
  } catch (const vapordet::ConfigError& e) {
    last_error = e.what();
    return VD_ERR_CONFIG;
  } catch (const vapordet::DomainError& e) {
    last_error = e.what();
    return VD_ERR_DOMAIN;
  } catch (const vapordet::IntegrationError& e) {
    last_error = e.what();
    return VD_ERR_INTEGRATION;
  } catch (const vapordet::InfeasibleError& e) {
    last_error = e.what();
    return VD_ERR_INFEASIBLE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return VD_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return VD_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw vapordet::DomainError(std::string(what) + " is null");
}

void fill(const vapordet::AbsorptionResult& r, vd_absorption* out) {
  out->beta_re = r.beta_final.real();
  out->beta_im = r.beta_final.imag();
  out->p_absorb = r.p_absorb;
  out->p_scatter = r.p_scatter;
}

}  // namespace

extern "C" {

const char* vd_last_error(void) { return last_error.c_str(); }
const char* vd_version(void) { return vapordet::kVersion.data(); }

vd_status vd_design_worked(vd_convention conv, vd_design** out) {
  return guard([&] {
    need(out, "out");
    *out = new vd_design{vapordet::worked_design(conv == VD_ANGULAR ? vapordet::FrequencyConvention::angular
                                                                   : vapordet::FrequencyConvention::ordinary)};
  });
}

vd_status vd_design_from_json(const char* json, vd_design** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw vapordet::ConfigError(e.what());
    }
    *out = new vd_design{vapordet::design_from_json(j)};
  });
}

vd_status vd_design_clone(const vd_design* d, vd_design** out) {
  return guard([&] {
    need(d, "design");
    need(out, "out");
    *out = new vd_design{d->d};
  });
}

vd_status vd_design_get(const vd_design* d, const char* field, double* value) {
  return guard([&] {
    need(d, "design");
    need(field, "field");
    need(value, "value");
    *value = vapordet::get_field(d->d, field);
  });
}

vd_status vd_design_set(vd_design* d, const char* field, double value) {
  return guard([&] {
    need(d, "design");
    need(field, "field");
    vapordet::set_field(d->d, field, value);
  });
}

vd_status vd_design_validate(const vd_design* d, size_t* count) {
  return guard([&] {
    need(d, "design");
    need(count, "count");
    const auto v = vapordet::validate_units(d->d);
    *count = v.size();
    scratch.clear();
    for (const auto& x : v) scratch += x.field + ": " + x.message + "\n";
  });
}

vd_status vd_design_to_json(const vd_design* d, const char** json) {
  return guard([&] {
    need(d, "design");
    need(json, "json");
    scratch = vapordet::design_to_json(d->d).dump();
    *json = scratch.c_str();
  });
}

void vd_design_free(vd_design* d) { delete d; }

vd_status vd_budget_eval(const vd_design* d, vd_budget* out) {
  return guard([&] {
    need(d, "design");
    need(out, "out");
    const auto r = vapordet::budget_report(d->d);
    *out = vd_budget{r.budget.eta,       r.budget.loss_scatter, r.budget.loss_transmission,
                     r.budget.loss_collision, r.atom_count,     r.tau_col,
                     r.l_abs,            r.t_ro,               r.zeeman_detuning,
                     r.p_dc,             r.net_dark.linear,    r.net_dark.exact,
                     r.budget.clamped ? 1 : 0, r.far_detuned ? 1 : 0};
  });
}

vd_status vd_photon_drive(const vd_design* d, double* drive) {
  return guard([&] {
    need(d, "design");
    need(drive, "drive");
    *drive = vapordet::photon_drive(d->d);
  });
}

vd_status vd_markov_square(const vd_design* d, double drive, vd_absorption* out) {
  return guard([&] {
    need(d, "design");
    need(out, "out");
    fill(vapordet::solve_markov_square(d->d, drive), out);
  });
}

vd_status vd_markov_numeric(const vd_design* d, double drive, double atol, double rtol, vd_absorption* out) {
  return guard([&] {
    need(d, "design");
    need(out, "out");
    vapordet::MarkovOptions opts;
    if (atol > 0.0) opts.tol.atol = atol;
    if (rtol > 0.0) opts.tol.rtol = rtol;
    const auto pulse = vapordet::PulseShape::square(d->d.pulse_duration);
    fill(vapordet::solve_markov_numeric(d->d, pulse, pulse, drive, opts), out);
  });
}

vd_status vd_readout_chain_eval(const vd_design* d, double readout_duration, vd_readout_chain* out) {
  return guard([&] {
    need(d, "design");
    need(out, "out");
    const auto c = vapordet::readout_chain(d->d, readout_duration);
    *out = vd_readout_chain{c.p_absorb, c.p_survive, c.p_register, c.p_dark, c.atoms};
  });
}

vd_status vd_run_command(const char* command, const char* config_json, const vd_run_options* options,
                         vd_run** out) {
  if (out) *out = nullptr;
  return guard([&] {
    need(command, "command");
    need(config_json, "config");
    need(out, "out");
    auto run = std::make_unique<vd_run>();
    std::optional<std::uint64_t> seed;
    vapordet::OutputFormat fmt = vapordet::OutputFormat::both;
    std::string base = ".";
    if (options) {
      if (options->has_seed) seed = options->seed;
      if (options->format < VD_FORMAT_JSON || options->format > VD_FORMAT_BOTH)
        throw vapordet::ConfigError("invalid output format");
      fmt = static_cast<vapordet::OutputFormat>(options->format);
      if (options->base_dir) base = options->base_dir;
    }
    const auto cfg = vapordet::parse_config(config_json, seed, base);
    run->output_dir = cfg.output_dir;
    run->out = vapordet::run_command(command, cfg, fmt);
    *out = run.release();
  });
}

const char* vd_run_summary(const vd_run* r) { return r ? r->out.summary.c_str() : ""; }
const char* vd_run_output_dir(const vd_run* r) { return r ? r->output_dir.c_str() : ""; }
size_t vd_run_file_count(const vd_run* r) { return r ? r->out.files.size() : 0; }

const char* vd_run_file_name(const vd_run* r, size_t i) {
  if (!r || i >= r->out.files.size()) return nullptr;
  return r->out.files[i].name.c_str();
}

const char* vd_run_file_data(const vd_run* r, size_t i, size_t* size) {
  if (!r || i >= r->out.files.size()) return nullptr;
  if (size) *size = r->out.files[i].content.size();
  return r->out.files[i].content.data();
}

void vd_run_free(vd_run* r) { delete r; }

}  // extern "C"
