#ifndef LOGPURITY_H
#define LOGPURITY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LpStatus {
  LP_STATUS_OK = 0,
  LP_STATUS_INVALID_ARGUMENT = 1,
  LP_STATUS_RESOURCE_LIMIT = 2,
  LP_STATUS_VERIFICATION_FAILED = 3,
  LP_STATUS_NULL_POINTER = 4,
  LP_STATUS_PARSE = 5,
  LP_STATUS_BUFFER_TOO_SMALL = 6,
  LP_STATUS_INTERNAL = 7,
  LP_STATUS_PANIC = 8,
} LpStatus;

/**
 * A homogeneous log differential form over an [`LpRing`].
 */
typedef struct LpForm LpForm;

/**
 * Outcome of a verification run: its JSON rendering and overall verdict.
 */
typedef struct LpReport LpReport;

/**
 * A coefficient ring `F_p[T_1..T_m]` with log variables and a weight window.
 */
typedef struct LpRing LpRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lp_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *lp_last_error(void);

/**
 * Creates `F_p[T_1..T_m]` with log variables `log_labels` (1-based) and
 * window radius `radius` (0 keeps the default).
 *
 * # Safety
 * `log_labels` must point to `n_log` bytes (or be null with `n_log == 0`);
 * `out` must be a valid pointer.
 */
enum LpStatus lp_ring_new(uint32_t p,
                          size_t m,
                          const uint8_t *log_labels,
                          size_t n_log,
                          int32_t radius,
                          struct LpRing **out);

/**
 * # Safety
 * `ring` must be null or come from [`lp_ring_new`] and not be freed yet.
 */
void lp_ring_free(struct LpRing *ring);

/**
 * Parses a form such as `2*T1^3*T2 dlogT1^dT3`. `degree < 0` infers the degree.
 *
 * # Safety
 * `ring` must be a live ring handle, `text` NUL-terminated, `out` valid.
 */
enum LpStatus lp_form_parse(const struct LpRing *ring,
                            const char *text_in,
                            int32_t degree,
                            struct LpForm **out);

/**
 * # Safety
 * `form` must be null or a live form handle.
 */
void lp_form_free(struct LpForm *form);

/**
 * Writes the form's text into `buf` (capacity `cap`); `*needed` gets the
 * required size. Returns `BufferTooSmall` when `cap` is short.
 *
 * # Safety
 * `form` live; `buf` writable for `cap` bytes or null; `needed` null or valid.
 */
enum LpStatus lp_form_to_string(const struct LpForm *form, char *buf, size_t cap, size_t *needed);

/**
 * # Safety
 * `form` live; `out` valid.
 */
enum LpStatus lp_form_degree(const struct LpForm *form, size_t *out);

/**
 * # Safety
 * `form` live; `out` valid.
 */
enum LpStatus lp_form_is_closed(const struct LpForm *form, bool *out);

/**
 * Exterior derivative.
 *
 * # Safety
 * `form` live; `out` valid.
 */
enum LpStatus lp_form_differential(const struct LpForm *form, struct LpForm **out);

/**
 * Cartier operator on a closed form.
 *
 * # Safety
 * `form` live; `out` valid.
 */
enum LpStatus lp_form_cartier(const struct LpForm *form, struct LpForm **out);

/**
 * `dim H^i(P^n, Ω^j(log Σ_{s∈log} V(X_s))(twist))` for `i = 0..=n` into
 * `dims` (capacity `cap`); `*len` receives `n + 1`.
 *
 * # Safety
 * `log` points to `n_log` values or is null with `n_log == 0`; `dims`
 * writable for `cap` entries; `len` valid.
 */
enum LpStatus lp_projective_cohomology(uint32_t p,
                                       size_t n,
                                       size_t j,
                                       int32_t twist,
                                       const size_t *log,
                                       size_t n_log,
                                       size_t *dims,
                                       size_t cap,
                                       size_t *len);

/**
 * Čech dimensions of `Ω^j(log(E + D̄_1))` on the blowup of `A^m` along
 * `V(T_1..T_c)`. Entry 0 is truncated to the stabilized weight box.
 *
 * # Safety
 * `dims` writable for `cap` entries; `len` valid.
 */
enum LpStatus lp_blowup_cohomology(uint32_t p,
                                   size_t m,
                                   size_t c,
                                   size_t j,
                                   size_t *dims,
                                   size_t cap,
                                   size_t *len);

/**
 * Runs a verification suite (`"all"` for every suite). `p == 0`, `m < 0`
 * and `n < 0` keep the suite's default grid. A report is produced even when
 * checks fail; the status is then `VerificationFailed`.
 *
 * # Safety
 * `suite` NUL-terminated; `out` valid.
 */
enum LpStatus lp_verify(const char *suite, uint32_t p, int32_t m, int32_t n, struct LpReport **out);

/**
 * JSON array of check outcomes; valid while the report lives.
 *
 * # Safety
 * `report` must be a live report handle.
 */
const char *lp_report_json(const struct LpReport *report);

/**
 * # Safety
 * `report` must be a live report handle.
 */
bool lp_report_passed(const struct LpReport *report);

/**
 * # Safety
 * `report` must be a live report handle.
 */
size_t lp_report_checks(const struct LpReport *report);

/**
 * # Safety
 * `report` must be null or a live report handle.
 */
void lp_report_free(struct LpReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOGPURITY_H */
