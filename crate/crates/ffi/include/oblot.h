#ifndef OBLOT_H
#define OBLOT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OblotStatus {
  OBLOT_STATUS_OK = 0,
  OBLOT_STATUS_NULL_POINTER = 1,
  OBLOT_STATUS_INVALID_UTF8 = 2,
  OBLOT_STATUS_SCHEMA = 3,
  OBLOT_STATUS_MODEL = 4,
  OBLOT_STATUS_CAPABILITY = 5,
  OBLOT_STATUS_USAGE = 6,
  OBLOT_STATUS_IO = 7,
  OBLOT_STATUS_UNKNOWN_ROBOT = 8,
  OBLOT_STATUS_FINISHED = 9,
  OBLOT_STATUS_FAIRNESS_FORCED = 10,
  OBLOT_STATUS_INTERNAL = 11,
  OBLOT_STATUS_PANIC = 12,
} OblotStatus;

typedef struct OblotScenario OblotScenario;

typedef struct OblotSession OblotSession;

typedef struct OblotTrace OblotTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *oblot_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *oblot_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, released once.
 */
void oblot_string_free(char *s);

/**
 * Parses and validates a scenario document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum OblotStatus oblot_scenario_from_json(const char *json, struct OblotScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from this library, released once.
 */
void oblot_scenario_free(struct OblotScenario *scenario);

/**
 * Runs a scenario to formation or its horizon.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum OblotStatus oblot_run(const struct OblotScenario *scenario, struct OblotTrace **out);

/**
 * # Safety
 * `trace` must be null or a handle from this library, released once.
 */
void oblot_trace_free(struct OblotTrace *trace);

/**
 * True when the run formed its pattern and went quiescent. False for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
bool oblot_trace_formed(const struct OblotTrace *trace);

/**
 * Number of executed rounds. Zero for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
uint64_t oblot_trace_rounds(const struct OblotTrace *trace);

/**
 * Number of completed epochs. Zero for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
uint64_t oblot_trace_epochs(const struct OblotTrace *trace);

/**
 * Hex digest of the round records. Release with `oblot_string_free`.
 *
 * # Safety
 * `trace` must be a live handle; `out` must be writable.
 */
enum OblotStatus oblot_trace_hash(const struct OblotTrace *trace, char **out);

/**
 * Line-delimited trace. Release with `oblot_string_free`.
 *
 * # Safety
 * `trace` must be a live handle; `out` must be writable.
 */
enum OblotStatus oblot_trace_to_jsonl(const struct OblotTrace *trace, char **out);

/**
 * Opens an interactive session on a scenario document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum OblotStatus oblot_session_new(const char *json, struct OblotSession **out);

/**
 * # Safety
 * `session` must be null or a handle from this library, released once.
 */
void oblot_session_free(struct OblotSession *session);

/**
 * Session state as JSON. Release with `oblot_string_free`.
 *
 * # Safety
 * `session` must be a live handle; `out` must be writable.
 */
enum OblotStatus oblot_session_state(const struct OblotSession *session, char **out);

/**
 * Preview of `robot`'s next move as JSON, without changing the session.
 *
 * # Safety
 * `session` must be a live handle; `out` must be writable.
 */
enum OblotStatus oblot_session_what_if(const struct OblotSession *session,
                                       uintptr_t robot,
                                       char **out);

/**
 * Activates `robot` for one round; the response (state and round event) is JSON.
 *
 * # Safety
 * `session` must be a live handle not used concurrently; `out` must be writable.
 */
enum OblotStatus oblot_session_step(struct OblotSession *session,
                                    uintptr_t robot,
                                    double stop_fraction,
                                    char **out);

/**
 * Smallest enclosing circle of `len` points given as parallel coordinate arrays.
 *
 * # Safety
 * `xs` and `ys` must point to `len` readable values; the outputs must be writable.
 */
enum OblotStatus oblot_sec(const double *xs,
                           const double *ys,
                           uintptr_t len,
                           double *out_cx,
                           double *out_cy,
                           double *out_r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OBLOT_H */
