/* C interface to the nvrr spin-readout simulator.
 *
 * All functions return NVRR_OK (0) on success. On failure they return a
 * status code and leave a human-readable message in nvrr_last_error(),
 * which points at thread-local storage valid until the next failing call
 * on the same thread. Handles are opaque and must be released with their
 * matching free function; strings returned through char** must be released
 * with nvrr_string_free().
 */
#ifndef NVRR_H
#define NVRR_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nvrr_status {
  NVRR_OK = 0,
  NVRR_ERR = 1,         /* I/O or internal failure */
  NVRR_ERR_CONFIG = 2,  /* config parse error or invalid value */
  NVRR_ERR_NUMERIC = 3  /* fit or calibration failure */
} nvrr_status;

const char* nvrr_version(void);
const char* nvrr_last_error(void);
void nvrr_string_free(char* text);

/* ---- rate formulas ---------------------------------------------------- */

/* Anti-crossing field d_es_ghz / gyromag_ghz_per_t, in tesla. */
nvrr_status nvrr_eslac_field(double d_es_ghz, double gyromag_ghz_per_t, double* out_tesla);

/* Per-optical-cycle flip-flop probabilities at field b0 (tesla). */
nvrr_status nvrr_flip_flop_probs(double b0_tesla, double d_es_ghz, double a_es_ghz,
                                 double gyromag_ghz_per_t, double* out_p_plus,
                                 double* out_p_minus);

/* Optical-pumping steady state of the nuclear ladder; out_pi holds the
 * populations of m_I = -1, 0, +1. */
nvrr_status nvrr_dnp_steady_state(double b0_tesla, double d_es_ghz, double a_es_ghz,
                                  double gyromag_ghz_per_t, double out_pi[3]);

/* Readout fidelity (1 + (c0+c1)/(c0-c1)^2)^(-1/2); 0 when c0 == c1. */
nvrr_status nvrr_readout_fidelity(double c0, double c1, double* out_f);

/* ---- scenarios --------------------------------------------------------- */

typedef struct nvrr_scenario nvrr_scenario;

nvrr_status nvrr_scenario_from_string(const char* text, nvrr_scenario** out);
nvrr_status nvrr_scenario_from_file(const char* path, nvrr_scenario** out);
nvrr_status nvrr_scenario_from_preset(const char* name, nvrr_scenario** out);
/* Comma-separated preset names; caller frees with nvrr_string_free. */
nvrr_status nvrr_preset_names(char** out);

/* Applies "section.key = value" on top of the scenario, e.g.
 * ("simulation.seed", "7") or ("protocol.kind", "\"repetitive\""). Bare words
 * that are not numbers are treated as strings for convenience. */
nvrr_status nvrr_scenario_override(nvrr_scenario* scenario, const char* dotted_key,
                                   const char* value);
/* Merges a config fragment file (e.g. one written by nvrr_calibrate_file). */
nvrr_status nvrr_scenario_merge_file(nvrr_scenario* scenario, const char* params_path);
nvrr_status nvrr_scenario_serialize(const nvrr_scenario* scenario, char** out_text);
void nvrr_scenario_free(nvrr_scenario* scenario);

typedef struct nvrr_summary {
  double f_max;
  int n_opt;
  double n_1e;               /* NaN when the saturation fit failed */
  int n_1e_low_confidence;   /* nonzero when the fit only bounds the scale */
  double duration_ms;
} nvrr_summary;

/* Simulates both preparations, writes trace.csv / fidelity.csv / summary.csv
 * (plus shots_prep*.csv for the Monte Carlo backend) under out_dir. */
nvrr_status nvrr_run(const nvrr_scenario* scenario, const char* out_dir, nvrr_summary* out);

/* ---- sweeps, calibration, plots ---------------------------------------- */

/* Runs the sweep described by the file (or preset) and writes sweep.csv under
 * out_dir. params_path may be NULL or a config fragment merged into the base. */
nvrr_status nvrr_sweep_file(const char* sweep_path, const char* params_path, const char* out_dir);
nvrr_status nvrr_sweep_preset(const char* name, const char* params_path, const char* out_dir);

/* Reads a [calibrate] targets file, runs the requested calibrations and
 * writes the resulting config fragment to out_path. */
nvrr_status nvrr_calibrate_file(const char* targets_path, const char* out_path);

/* Renders a CSV produced by run/sweep into a static SVG. kind is one of
 * "fidelity_curve", "signal", "nr_sweep", "field_sweep". */
nvrr_status nvrr_plot(const char* csv_path, const char* kind, const char* svg_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NVRR_H */
