#ifndef ZONEPLACE_H
#define ZONEPLACE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ZpStatus {
  ZP_STATUS_OK = 0,
  ZP_STATUS_NULL_POINTER = 1,
  ZP_STATUS_INVALID_UTF8 = 2,
  ZP_STATUS_PARSE = 3,
  ZP_STATUS_UNSUPPORTED_GATE = 4,
  ZP_STATUS_OPERAND_OUT_OF_RANGE = 5,
  ZP_STATUS_VALIDATION = 6,
  ZP_STATUS_INVALID_ADDRESS = 7,
  ZP_STATUS_CAPACITY = 8,
  ZP_STATUS_ROUTING = 9,
  ZP_STATUS_CONTRACT = 10,
  ZP_STATUS_SEARCH_BUDGET = 11,
  ZP_STATUS_COVERAGE = 12,
  ZP_STATUS_IO = 13,
  ZP_STATUS_JSON = 14,
  ZP_STATUS_PANIC = 15,
} ZpStatus;

typedef enum ZpFormat {
  ZP_FORMAT_QASM = 0,
  ZP_FORMAT_JSON = 1,
} ZpFormat;

typedef enum ZpPlacer {
  ZP_PLACER_AWARE = 0,
  ZP_PLACER_BASELINE = 1,
} ZpPlacer;

typedef enum ZpProfile {
  ZP_PROFILE_QASMBENCH = 0,
  ZP_PROFILE_LARGE = 1,
} ZpProfile;

typedef struct ZpArchitecture ZpArchitecture;

typedef struct ZpCircuit ZpCircuit;

typedef struct ZpProgram ZpProgram;

/**
 * Compiler settings. Obtain defaults from [`zp_compile_options_default`].
 */
typedef struct ZpCompileOptions {
  enum ZpPlacer placer;
  double alpha;
  double beta;
  double gamma;
  double delta;
  /**
   * Candidate window rows; 0 together with `window_cols` 0 uses the architecture default.
   */
  uint32_t window_rows;
  uint32_t window_cols;
  size_t max_nodes;
  double rydberg_pulse_us;
  double one_qubit_layer_us;
} ZpCompileOptions;

typedef struct ZpMetrics {
  double placement_time_ms;
  double routing_time_ms;
  size_t rearrangement_steps;
  double rearrangement_time_ms;
  size_t trap_transfers;
  double total_time_ms;
} ZpMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the library
 * and valid until the next call on this thread.
 */
const char *zp_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void zp_string_free(char *s);

/**
 * Built-in default architecture.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum ZpStatus zp_architecture_builtin(struct ZpArchitecture **out);

/**
 * Parses an architecture from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum ZpStatus zp_architecture_load_json(const char *json, struct ZpArchitecture **out);

/**
 * # Safety
 * `arch` must be null or a handle from this library not yet freed.
 */
void zp_architecture_free(struct ZpArchitecture *arch);

/**
 * Parses a circuit from QASM or circuit JSON text.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` valid for writes.
 */
enum ZpStatus zp_circuit_parse(const char *source, enum ZpFormat format, struct ZpCircuit **out);

/**
 * Number of qubits of a circuit, or 0 for null.
 *
 * # Safety
 * `circuit` must be null or a live handle.
 */
size_t zp_circuit_num_qubits(const struct ZpCircuit *circuit);

/**
 * # Safety
 * `circuit` must be null or a handle from this library not yet freed.
 */
void zp_circuit_free(struct ZpCircuit *circuit);

/**
 * Default settings for a parameter profile, using the routing-aware placer and
 * zero gate durations.
 */
struct ZpCompileOptions zp_compile_options_default(enum ZpProfile profile);

/**
 * Compiles a circuit. A null `options` uses the default profile.
 *
 * # Safety
 * `circuit` and `arch` must be live handles, `options` null or valid for reads
 * and `out` valid for writes.
 */
enum ZpStatus zp_compile(const struct ZpCircuit *circuit,
                         const struct ZpArchitecture *arch,
                         const struct ZpCompileOptions *options,
                         struct ZpProgram **out);

/**
 * # Safety
 * `program` must be a live handle and `out` valid for writes.
 */
enum ZpStatus zp_program_metrics(const struct ZpProgram *program, struct ZpMetrics *out);

/**
 * Program JSON. Release the string with [`zp_string_free`].
 *
 * # Safety
 * `program` must be a live handle and `out` valid for writes.
 */
enum ZpStatus zp_program_to_json(const struct ZpProgram *program, char **out);

/**
 * # Safety
 * `program` must be null or a handle from this library not yet freed.
 */
void zp_program_free(struct ZpProgram *program);

/**
 * Duration in µs of a single move over `distance_um` on `arch`.
 *
 * # Safety
 * `arch` must be a live handle and `out` valid for writes.
 */
enum ZpStatus zp_movement_time_us(const struct ZpArchitecture *arch,
                                  double distance_um,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZONEPLACE_H */
