#ifndef KILLING_H
#define KILLING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum KfStatus {
  KF_STATUS_OK = 0,
  KF_STATUS_NULL_ARGUMENT = 1,
  KF_STATUS_INVALID_UTF8 = 2,
  /**
   * Expression syntax, unknown variable or a domain error while evaluating.
   */
  KF_STATUS_EXPRESSION = 3,
  KF_STATUS_INVALID_METRIC = 4,
  KF_STATUS_SINGULAR_METRIC = 5,
  KF_STATUS_SIGNATURE_MISMATCH = 6,
  KF_STATUS_INVALID_CONFIG = 7,
  KF_STATUS_UNKNOWN_CATALOG_ENTRY = 8,
  /**
   * Any other failure inside the analysis.
   */
  KF_STATUS_ANALYSIS = 9,
  KF_STATUS_IO = 10,
  KF_STATUS_PANIC = 11,
} KfStatus;

typedef struct KfMetric KfMetric;

typedef struct KfReport KfReport;

/**
 * Analysis settings. Zero in `max_order` or `jet_order` selects the default.
 */
typedef struct KfConfig {
  /**
   * Nonzero for floating-point arithmetic.
   */
  int32_t float_mode;
  double tol;
  uint32_t max_order;
  uint32_t jet_order;
  uint32_t probes;
  /**
   * Read through its shortest decimal form, so `0.01` means `1/100`.
   */
  double probe_radius;
  uint64_t probe_seed;
} KfConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with the defaults: exact mode, `tol = 1e-9`, 4 probes of
 * radius `1/100`.
 *
 * # Safety
 * `out` must be null or point to writable memory for a `KfConfig`.
 */
enum KfStatus kf_config_default(struct KfConfig *out);

/**
 * Parses a metric file given as TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum KfStatus kf_metric_from_toml(const char *toml, struct KfMetric **out);

/**
 * Looks up a built-in metric by name, e.g. `"sphere"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum KfStatus kf_metric_catalog(const char *name, struct KfMetric **out);

/**
 * Dimension of the metric, 0 for a null handle.
 *
 * # Safety
 * `metric` must be null or a live handle.
 */
size_t kf_metric_dim(const struct KfMetric *metric);

/**
 * # Safety
 * `metric` must be null or a handle not yet freed.
 */
void kf_metric_free(struct KfMetric *metric);

/**
 * Runs the full analysis. `point` is a comma-separated coordinate list
 * such as `"1/2,0"`, or null for the metric's default point; `config`
 * may be null for the defaults.
 *
 * # Safety
 * `metric` must be a live handle, `point` null or NUL-terminated,
 * `config` null or valid, and `out` a valid pointer.
 */
enum KfStatus kf_analyze(const struct KfMetric *metric,
                         const char *point,
                         const struct KfConfig *config,
                         struct KfReport **out);

/**
 * Number of independent local Killing fields found.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t kf_report_terminal_dim(const struct KfReport *report);

/**
 * The flag's rank sequence. Writes at most `cap` entries to `ranks` and
 * returns the full length.
 *
 * # Safety
 * `report` must be null or a live handle; `ranks` must have room for
 * `cap` entries unless `cap` is 0.
 */
size_t kf_report_ranks(const struct KfReport *report, size_t *ranks, size_t cap);

/**
 * Algebra label such as `"so(3)-type"`, empty if the algebra was not
 * computed. Borrowed from the report.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
const char *kf_report_label(const struct KfReport *report);

/**
 * 0 for a clean report, 2 when a warning casts doubt on the result.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t kf_report_exit_code(const struct KfReport *report);

/**
 * The report as JSON; release with [`kf_string_free`].
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *kf_report_json(const struct KfReport *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void kf_report_free(struct KfReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void kf_string_free(char *s);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *kf_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *kf_status_name(enum KfStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KILLING_H */
