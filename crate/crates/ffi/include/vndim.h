#ifndef VNDIM_H
#define VNDIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VndimStatus {
  VNDIM_STATUS_OK = 0,
  VNDIM_STATUS_NULL_POINTER = 1,
  VNDIM_STATUS_INVALID_UTF8 = 2,
  VNDIM_STATUS_INVALID_ARGUMENT = 3,
  VNDIM_STATUS_COMPUTATION_FAILED = 4,
  VNDIM_STATUS_PANIC = 5,
} VndimStatus;

// Settings shared by calls: rule constants, generator lengths, length rule.
typedef struct VndimSession VndimSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next call on the thread.
const char *vndim_last_error(void);

// Creates a session for `profile` ("paper" or "desk").
//
// # Safety
// `profile` must be a NUL-terminated string and `out` writable.
enum VndimStatus vndim_session_new(const char *profile, struct VndimSession **out);

// Applies `key = value` lines, as in a config file.
//
// # Safety
// `s` must come from [`vndim_session_new`]; `text` must be NUL-terminated.
enum VndimStatus vndim_session_configure(struct VndimSession *s, const char *text);

// # Safety
// `s` must come from [`vndim_session_new`] and not be used afterwards.
// Null is ignored.
void vndim_session_free(struct VndimSession *s);

// # Safety
// `s` must be a string handed out by this library, or null.
void vndim_string_free(char *s);

// `|B(P, r)|` for a path `P` with `vertices` vertices.
uint64_t vndim_path_ball_size(uint64_t vertices, uint32_t r);

// Nullity of `Q - 4` for the quotient graph with `len` path vertices.
// `case_code` is 11, 12 or 22.
//
// # Safety
// `s` must come from [`vndim_session_new`]; `out` must be writable.
enum VndimStatus vndim_nullity(const struct VndimSession *s,
                               size_t len,
                               uint32_t case_code,
                               size_t *out);

// Whether `word` (letters a, A, b, B; "e" for the identity) lies in the
// subgroup generated by the listed indices, e.g. "1,2".
//
// # Safety
// Strings must be NUL-terminated; `out` writable.
enum VndimStatus vndim_is_member(const struct VndimSession *s,
                                 const char *indices,
                                 const char *word,
                                 bool *out);

// Partial dimension report as JSON.
//
// # Safety
// Strings must be NUL-terminated; `out_json` writable. Free the result
// with [`vndim_string_free`].
enum VndimStatus vndim_dimension(const struct VndimSession *s,
                                 const char *indices,
                                 size_t truncation,
                                 char **out_json);

// Certificate comparing two index sets; `out_certified` is set to whether
// the upper set's dimension is certified larger.
//
// # Safety
// Strings must be NUL-terminated; outputs writable. Free the JSON with
// [`vndim_string_free`].
enum VndimStatus vndim_compare(const struct VndimSession *s,
                               const char *lower,
                               const char *upper,
                               size_t truncation,
                               bool *out_certified,
                               char **out_json);

// Re-derives a certificate's verdict from its JSON; `out_consistent` is
// set to whether the stated verdict matches.
//
// # Safety
// `json` must be NUL-terminated; `out_consistent` writable.
enum VndimStatus vndim_recheck_certificate(const char *json, bool *out_consistent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VNDIM_H */
