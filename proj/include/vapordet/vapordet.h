/* C interface to the vapordet simulator. All handles are opaque; every call
 * returns a vd_status and leaves a message in vd_last_error() on failure. */
#ifndef VAPORDET_H
#define VAPORDET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VD_API __declspec(dllexport)
#elif defined(__GNUC__)
#define VD_API __attribute__((visibility("default")))
#else
#define VD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vd_status {
  VD_OK = 0,
  VD_ERR_CONFIG = 1,      /* malformed input, unknown field, bad units */
  VD_ERR_DOMAIN = 2,      /* argument outside the model's domain */
  VD_ERR_INTEGRATION = 3, /* ODE step underflow, budget or drift */
  VD_ERR_INFEASIBLE = 4,  /* optimizer found no feasible design */
  VD_ERR_INTERNAL = 5
} vd_status;

typedef enum vd_convention { VD_ORDINARY = 0, VD_ANGULAR = 1 } vd_convention;

typedef enum vd_format { VD_FORMAT_JSON = 1, VD_FORMAT_CSV = 2, VD_FORMAT_BOTH = 3 } vd_format;

/* Message for the last failing call on this thread; empty after success. */
VD_API const char* vd_last_error(void);
VD_API const char* vd_version(void);

typedef struct vd_design vd_design;

VD_API vd_status vd_design_worked(vd_convention conv, vd_design** out);
/* Accepts the "design" block of a run config. */
VD_API vd_status vd_design_from_json(const char* json, vd_design** out);
VD_API vd_status vd_design_clone(const vd_design* d, vd_design** out);
VD_API vd_status vd_design_get(const vd_design* d, const char* field, double* value);
VD_API vd_status vd_design_set(vd_design* d, const char* field, double value);
/* Writes the number of unit violations to *count; VD_OK even when nonzero. */
VD_API vd_status vd_design_validate(const vd_design* d, size_t* count);
/* Serialized design; the string lives until the next call on this thread. */
VD_API vd_status vd_design_to_json(const vd_design* d, const char** json);
VD_API void vd_design_free(vd_design* d);

typedef struct vd_budget {
  double eta;
  double loss_scatter;
  double loss_transmission;
  double loss_collision;
  double atom_count;
  double tau_col;
  double l_abs;
  double t_ro;
  double zeeman_detuning;
  double p_dc;
  double net_dark_linear;
  double net_dark_exact;
  int clamped;
  int far_detuned;
} vd_budget;

VD_API vd_status vd_budget_eval(const vd_design* d, vd_budget* out);

typedef struct vd_absorption {
  double beta_re;
  double beta_im;
  double p_absorb;
  double p_scatter;
} vd_absorption;

/* Photon drive magnitude implied by the design. */
VD_API vd_status vd_photon_drive(const vd_design* d, double* drive);
/* Square escort and photon of length T_p, closed form. */
VD_API vd_status vd_markov_square(const vd_design* d, double drive, vd_absorption* out);
/* Same problem integrated numerically. */
VD_API vd_status vd_markov_numeric(const vd_design* d, double drive, double atol, double rtol,
                                   vd_absorption* out);

typedef struct vd_readout_chain {
  double p_absorb;
  double p_survive;
  double p_register;
  double p_dark;
  uint64_t atoms;
} vd_readout_chain;

VD_API vd_status vd_readout_chain_eval(const vd_design* d, double readout_duration,
                                       vd_readout_chain* out);

/* Full command runs, as used by the command-line tool. */
typedef struct vd_run_options {
  int has_seed;
  uint64_t seed;
  vd_format format;
  const char* base_dir; /* for relative species_file paths; NULL means "." */
} vd_run_options;

typedef struct vd_run vd_run;

/* On failure *out may still hold a run whose summary is empty; always free. */
VD_API vd_status vd_run_command(const char* command, const char* config_json,
                                const vd_run_options* options, vd_run** out);
VD_API const char* vd_run_summary(const vd_run* r);
VD_API const char* vd_run_output_dir(const vd_run* r);
VD_API size_t vd_run_file_count(const vd_run* r);
VD_API const char* vd_run_file_name(const vd_run* r, size_t i);
VD_API const char* vd_run_file_data(const vd_run* r, size_t i, size_t* size);
VD_API void vd_run_free(vd_run* r);

#ifdef __cplusplus
}
#endif

#endif
