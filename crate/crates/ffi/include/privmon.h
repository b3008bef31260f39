#ifndef PRIVMON_H
#define PRIVMON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Matches the command-line exit codes where they overlap.
 */
typedef enum PrivmonStatus {
  PRIVMON_STATUS_OK = 0,
  PRIVMON_STATUS_NULL_ARGUMENT = 1,
  PRIVMON_STATUS_INVALID = 2,
  PRIVMON_STATUS_PROTOCOL = 3,
  PRIVMON_STATUS_IO = 4,
  PRIVMON_STATUS_PANIC = 5,
} PrivmonStatus;

typedef struct PrivmonCircuit PrivmonCircuit;

typedef struct PrivmonFormula PrivmonFormula;

typedef struct PrivmonTrace PrivmonTrace;

/**
 * Gate statistics of a circuit. `total` counts gates and flip-flops.
 */
typedef struct PrivmonStats {
  size_t total;
  size_t and_gates;
  size_t xor_gates;
  size_t not_gates;
  size_t const_gates;
  size_t dffs;
  size_t wires;
  size_t n;
  size_t m;
  uint32_t width;
  size_t cycles;
} PrivmonStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call on the same thread.
 */
const char *privmon_last_error(void);

/**
 * Largest robustness value (`PINF`) at `width` bits, or 0 if unsupported.
 */
int64_t privmon_pinf(uint32_t width);

/**
 * Build a trace from `len` samples.
 *
 * # Safety
 * `times` and `values` must point to `len` readable integers; `out` must be
 * writable.
 */
enum PrivmonStatus privmon_trace_new(const int64_t *times,
                                     const int64_t *values,
                                     size_t len,
                                     uint32_t width_bits,
                                     struct PrivmonTrace **out_trace);

/**
 * Load a `t,x` CSV trace.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PrivmonStatus privmon_trace_load_csv(const char *path,
                                          uint32_t width_bits,
                                          struct PrivmonTrace **out_trace);

/**
 * Number of samples, 0 for null.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t privmon_trace_len(const struct PrivmonTrace *trace);

/**
 * # Safety
 * `trace` must be null or a live handle, not used afterwards.
 */
void privmon_trace_free(struct PrivmonTrace *trace);

/**
 * Parse and encode a formula. `m_max = 0` uses the formula's own node
 * count; otherwise the encoding is padded to `m_max` nodes.
 *
 * # Safety
 * `formula` must be a NUL-terminated string; `out` must be writable.
 */
enum PrivmonStatus privmon_formula_parse(const char *formula,
                                         size_t m_max,
                                         uint32_t width_bits,
                                         struct PrivmonFormula **out_formula);

/**
 * Encoded node count (including padding), 0 for null.
 *
 * # Safety
 * `formula` must be null or a live handle.
 */
size_t privmon_formula_nodes(const struct PrivmonFormula *formula);

/**
 * # Safety
 * `formula` must be null or a live handle, not used afterwards.
 */
void privmon_formula_free(struct PrivmonFormula *formula);

/**
 * Cleartext robustness at sample 0.
 *
 * # Safety
 * Handles must be live; `out_rob` must be writable.
 */
enum PrivmonStatus privmon_monitor(const struct PrivmonTrace *trace,
                                   const struct PrivmonFormula *formula,
                                   int64_t *out_rob);

/**
 * Synthesize the monitor circuit for `n` samples and `m` formula nodes.
 *
 * # Safety
 * `out_circuit` must be writable.
 */
enum PrivmonStatus privmon_circuit_build(size_t n,
                                         size_t m,
                                         uint32_t width_bits,
                                         struct PrivmonCircuit **out_circuit);

/**
 * Load a netlist in the text format.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_circuit` must be writable.
 */
enum PrivmonStatus privmon_circuit_load(const char *path, struct PrivmonCircuit **out_circuit);

/**
 * Write the netlist in the text format.
 *
 * # Safety
 * `circuit` must be live; `path` must be a NUL-terminated string.
 */
enum PrivmonStatus privmon_circuit_save(const struct PrivmonCircuit *circuit, const char *path);

/**
 * # Safety
 * `circuit` must be live; `out_stats` must be writable.
 */
enum PrivmonStatus privmon_circuit_stats(const struct PrivmonCircuit *circuit,
                                         struct PrivmonStats *out_stats);

/**
 * # Safety
 * `circuit` must be null or a live handle, not used afterwards.
 */
void privmon_circuit_free(struct PrivmonCircuit *circuit);

/**
 * Cleartext simulation for a fixed number of cycles; `cycles = 0` uses the
 * circuit's worst case.
 *
 * # Safety
 * Handles must be live; `out_rob` must be writable.
 */
enum PrivmonStatus privmon_simulate(const struct PrivmonCircuit *circuit,
                                    const struct PrivmonTrace *trace,
                                    const struct PrivmonFormula *formula,
                                    size_t cycles,
                                    int64_t *out_rob);

/**
 * Run both protocol roles over a loopback connection and return the
 * evaluator's result. `kappa_bits` is 128 or 256; `cycles = 0` uses the
 * worst case; a null `seed` draws fresh randomness.
 *
 * # Safety
 * Handles must be live; `seed` must be null or readable; `out_rob` must be
 * writable.
 */
enum PrivmonStatus privmon_garble_evaluate(const struct PrivmonCircuit *circuit,
                                           const struct PrivmonTrace *trace,
                                           const struct PrivmonFormula *formula,
                                           uint32_t kappa_bits,
                                           size_t cycles,
                                           const uint64_t *seed,
                                           int64_t *out_rob);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRIVMON_H */
