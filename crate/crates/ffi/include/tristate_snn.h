#ifndef TRISTATE_SNN_H
#define TRISTATE_SNN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TsnStatus {
  TSN_STATUS_OK = 0,
  TSN_STATUS_NULL_POINTER = 1,
  TSN_STATUS_INVALID_UTF8 = 2,
  TSN_STATUS_UNKNOWN_KEY = 3,
  TSN_STATUS_BAD_VALUE = 4,
  TSN_STATUS_INVALID_PARAMS = 5,
  TSN_STATUS_UNKNOWN_PRESET = 6,
  TSN_STATUS_CALIBRATION = 7,
  TSN_STATUS_IO = 8,
  TSN_STATUS_BUFFER_TOO_SMALL = 9,
  TSN_STATUS_PANIC = 10,
} TsnStatus;

/**
 * Parameter set handle.
 */
typedef struct TsnParams TsnParams;

/**
 * Simulation handle. Holds the trace recorded by `tsn_sim_run_to_end`.
 */
typedef struct TsnSim TsnSim;

/**
 * Observables at the current simulation time.
 */
typedef struct TsnObservation {
  double t_ms;
  double i_syn_na;
  double i_target_na;
  double i_ca_na;
  double membrane_v;
  bool learn;
  uint64_t post_spike_count;
} TsnObservation;

/**
 * Static description of a status code. Never null.
 */
const char *tsn_status_str(enum TsnStatus status);

/**
 * Message for the last failure on this thread. Valid until the next failing
 * call on the same thread. Never null.
 */
const char *tsn_last_error(void);

/**
 * Default parameter set. Free with `tsn_params_free`.
 */
struct TsnParams *tsn_params_new_default(void);

/**
 * Parameter set of a named preset, e.g. "fig5_retain".
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum TsnStatus tsn_params_from_preset(const char *name, struct TsnParams **out);

/**
 * Defaults overlaid with a `key = value` config file, validated.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TsnStatus tsn_params_load_config(const char *path, struct TsnParams **out);

/**
 * # Safety
 * `params` must be null or a handle from this library, not yet freed.
 */
void tsn_params_free(struct TsnParams *params);

/**
 * Sets one parameter by key. Values are parsed as in config files.
 *
 * # Safety
 * `params` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum TsnStatus tsn_params_set(struct TsnParams *params, const char *key, const char *value);

/**
 * Copies the text form of a parameter into `buf`, NUL-terminated. The
 * required size including the terminator is stored in `needed` when it is
 * non-null, also on `BufferTooSmall`.
 *
 * # Safety
 * `params` must be a live handle; `key` a NUL-terminated string; `buf` must
 * hold `len` bytes or be null with `len` 0.
 */
enum TsnStatus tsn_params_get(const struct TsnParams *params,
                              const char *key,
                              char *buf,
                              size_t len,
                              size_t *needed);

/**
 * # Safety
 * `params` must be a live handle.
 */
enum TsnStatus tsn_params_validate(const struct TsnParams *params);

/**
 * Analog weight current of a synapse whose capacitor sits at `v_w`.
 * Returns NaN if `params` is null.
 *
 * # Safety
 * `params` must be null or a live handle.
 */
double tsn_discretize_weight(const struct TsnParams *params, double v_w);

/**
 * New simulation from a copy of `params`, with the stimulus it describes.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum TsnStatus tsn_sim_new(const struct TsnParams *params, struct TsnSim **out);

/**
 * # Safety
 * `sim` must be null or a handle from this library, not yet freed.
 */
void tsn_sim_free(struct TsnSim *sim);

/**
 * Advances up to `n_steps` steps, stopping at the end of the run. The number
 * of output spikes is stored in `spikes` when it is non-null.
 *
 * # Safety
 * `sim` must be a live handle; `spikes` null or writable.
 */
enum TsnStatus tsn_sim_step(struct TsnSim *sim, uint64_t n_steps, uint64_t *spikes);

/**
 * Runs to the end and keeps the recorded trace in the handle. Rows start at
 * the current time; a fresh simulation includes the t = 0 row.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum TsnStatus tsn_sim_run_to_end(struct TsnSim *sim);

/**
 * Current time in ms, or NaN for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double tsn_sim_time(const struct TsnSim *sim);

/**
 * # Safety
 * `sim` must be null or a live handle.
 */
bool tsn_sim_is_finished(const struct TsnSim *sim);

/**
 * # Safety
 * `sim` must be a live handle; `out` writable.
 */
enum TsnStatus tsn_sim_observe(const struct TsnSim *sim, struct TsnObservation *out);

/**
 * Copies the synaptic capacitor voltages into `buf`. The synapse count is
 * stored in `n` when it is non-null, also on `BufferTooSmall`.
 *
 * # Safety
 * `sim` must be a live handle; `buf` must hold `len` doubles or be null with
 * `len` 0.
 */
enum TsnStatus tsn_sim_weights(const struct TsnSim *sim, double *buf, size_t len, size_t *n);

/**
 * Rows in the stored trace; 0 before `tsn_sim_run_to_end`.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t tsn_sim_trace_len(const struct TsnSim *sim);

/**
 * Writes the stored trace as CSV.
 *
 * # Safety
 * `sim` must be a live handle; `path` a NUL-terminated string.
 */
enum TsnStatus tsn_sim_write_trace(const struct TsnSim *sim, const char *path);

#endif  /* TRISTATE_SNN_H */
