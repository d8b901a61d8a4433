#ifndef HKQK_H
#define HKQK_H

/* Generated by cbindgen from the hkqk-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HkqkStatus {
  HKQK_STATUS_OK = 0,
  /*
   The run completed and some check failed.
   */
  HKQK_STATUS_VERIFICATION_FAILED = 1,
  /*
   The configuration could not be parsed or is invalid.
   */
  HKQK_STATUS_CONFIG_ERROR = 2,
  /*
   The model could not be built or the run aborted.
   */
  HKQK_STATUS_RUN_ERROR = 3,
  HKQK_STATUS_NULL_POINTER = 4,
  HKQK_STATUS_INVALID_UTF8 = 5,
  HKQK_STATUS_PANIC = 6,
} HkqkStatus;

/*
 A parsed model configuration.
 */
typedef struct HkqkConfig HkqkConfig;

/*
 A finished verification report.
 */
typedef struct HkqkReport HkqkReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a model parameter file given as JSON text.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HkqkStatus hkqk_config_from_json(const char *json, struct HkqkConfig **out);

/*
 Overrides the sampling settings; `mode` is 0 for symbolic, 1 for sampled.

 # Safety
 `config` must come from `hkqk_config_from_json`.
 */
enum HkqkStatus hkqk_config_set_sampling(struct HkqkConfig *config,
                                         int mode,
                                         uintptr_t samples,
                                         uint64_t seed);

/*
 # Safety
 `config` must come from `hkqk_config_from_json` or be null.
 */
void hkqk_config_free(struct HkqkConfig *config);

/*
 Runs the pipeline. A report is produced whenever the run completes, and
 the status is `HKQK_STATUS_VERIFICATION_FAILED` if any check failed.

 # Safety
 `config` must come from `hkqk_config_from_json` and `out` be a valid pointer.
 */
enum HkqkStatus hkqk_run(const struct HkqkConfig *config, struct HkqkReport **out);

/*
 1 if every check passed, 0 if not, -1 for a null report.

 # Safety
 `report` must come from `hkqk_run` or be null.
 */
int hkqk_report_passed(const struct HkqkReport *report);

/*
 The report as JSON; null for a null report.

 # Safety
 `report` must come from `hkqk_run` or be null.
 */
char *hkqk_report_to_json(const struct HkqkReport *report);

/*
 The report as text; null for a null report.

 # Safety
 `report` must come from `hkqk_run` or be null.
 */
char *hkqk_report_to_text(const struct HkqkReport *report);

/*
 # Safety
 `report` must come from `hkqk_run` or be null.
 */
void hkqk_report_free(struct HkqkReport *report);

/*
 Every check name with its anchor, one per line.
 */
char *hkqk_list_checks(void);

/*
 # Safety
 `s` must be a string returned by this library or null.
 */
void hkqk_string_free(char *s);

/*
 Message of the last failure on this thread, or null. The pointer stays
 valid until the next call into the library on the same thread.
 */
const char *hkqk_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HKQK_H */
