#ifndef POLYREASON_H
#define POLYREASON_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Input language for `pr_check`.
 */
typedef enum PrLanguage {
  PR_LANGUAGE_LP = 0,
  PR_LANGUAGE_FOL = 1,
  PR_LANGUAGE_CSP = 2,
  PR_LANGUAGE_SMT = 3,
} PrLanguage;

/**
 * Result code of every fallible call.
 */
typedef enum PrStatus {
  PR_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PR_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PR_STATUS_INVALID_UTF8 = 2,
  /**
   * The configuration could not be read or is invalid.
   */
  PR_STATUS_CONFIG = 3,
  /**
   * The program text has parse or validation errors.
   */
  PR_STATUS_DIAGNOSTICS = 4,
  /**
   * The run finished but at least one question has no answer.
   */
  PR_STATUS_PARTIAL = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  PR_STATUS_PANIC = 6,
} PrStatus;

/**
 * Opaque pipeline handle.
 */
typedef struct PrPipeline PrPipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a pipeline with the offline defaults.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum PrStatus pr_pipeline_new(struct PrPipeline **out);

/**
 * Creates a pipeline from a TOML configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PrStatus pr_pipeline_from_config(const char *path, struct PrPipeline **out);

/**
 * Releases a pipeline. Null is ignored.
 *
 * # Safety
 * `pipeline` must come from a `pr_pipeline_*` constructor and not be used afterwards.
 */
void pr_pipeline_free(struct PrPipeline *pipeline);

/**
 * Solves every question in `text`. On `PR_STATUS_OK` or `PR_STATUS_PARTIAL`,
 * `out_json` receives `{"answers":[{"problem_id","answer"}],"complete":bool}`,
 * plus `"trace"` when `with_trace` is non-zero.
 *
 * # Safety
 * `pipeline` must be a live handle, `text` a NUL-terminated string and
 * `out_json` a valid pointer.
 */
enum PrStatus pr_solve(const struct PrPipeline *pipeline,
                       const char *text,
                       int32_t with_trace,
                       char **out_json);

/**
 * Parses and validates a program. On `PR_STATUS_DIAGNOSTICS`, `out_diagnostics`
 * (when non-null) receives one diagnostic per line.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_diagnostics` may be null.
 */
enum PrStatus pr_check(enum PrLanguage language, const char *text, char **out_diagnostics);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *pr_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pr_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *pr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYREASON_H */
