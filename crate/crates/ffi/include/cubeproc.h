#ifndef CUBEPROC_H
#define CUBEPROC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_ARGUMENT = 1,
  CP_STATUS_INVALID_UTF8 = 2,
  CP_STATUS_PARSE = 3,
  CP_STATUS_INVALID = 4,
  CP_STATUS_PARAMS = 5,
  CP_STATUS_NOT_STATIONARY = 6,
  CP_STATUS_INEQUALITY = 7,
  CP_STATUS_BUDGET = 8,
  /**
   * Extraction found no witness; the output holds the certificate.
   */
  CP_STATUS_PSEUDORANDOM = 9,
  CP_STATUS_OTHER = 10,
  CP_STATUS_PANIC = 11,
} CpStatus;

/**
 * Opaque process handle.
 */
typedef struct CpProcess CpProcess;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a process spec. On success `*out` owns a handle for `cp_process_free`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum CpStatus cp_process_from_json(const char *json, struct CpProcess **out);

/**
 * # Safety
 * `p` must come from `cp_process_from_json` and not be freed twice.
 */
void cp_process_free(struct CpProcess *p);

/**
 * The line stationarity modulus as an `"a/b"` string.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum CpStatus cp_eta_star_lines(const struct CpProcess *p, char **out);

/**
 * Type of a tuple given as a JSON word list.
 *
 * # Safety
 * `words` must be a nul-terminated string and `out` a valid pointer.
 */
enum CpStatus cp_type_of_tuple_json(const char *words, char **out);

/**
 * Separation indices of a tuple and of its set.
 *
 * # Safety
 * `words` must be a nul-terminated string and `out` a valid pointer.
 */
enum CpStatus cp_separation_index_json(const char *words, char **out);

/**
 * Run an extraction described by `request`
 * (`{"mode": "lines"|"onesep"|"simplicial", "epsilon": "a/b", "sigma": "a/b", ...}`).
 * Writes the witness or certificate JSON; returns `Pseudorandom` for a
 * certificate.
 *
 * # Safety
 * `p` must be a live handle, `request` a nul-terminated string and `out` a
 * valid pointer.
 */
enum CpStatus cp_extract_json(const struct CpProcess *p, const char *request, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void cp_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *cp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBEPROC_H */
