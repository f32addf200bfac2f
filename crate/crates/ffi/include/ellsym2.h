#ifndef ELLSYM2_H
#define ELLSYM2_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define ELLSYM2_FN_L31 0

#define ELLSYM2_FN_L32 1

#define ELLSYM2_FN_DE 2

#define ELLSYM2_FN_JE 3

#define ELLSYM2_FORM_F 0

#define ELLSYM2_FORM_G 1

typedef enum Ellsym2Status {
  ELLSYM2_STATUS_OK = 0,
  ELLSYM2_STATUS_NULL_POINTER = 1,
  ELLSYM2_STATUS_INVALID_ARGUMENT = 2,
  ELLSYM2_STATUS_DOMAIN = 3,
  ELLSYM2_STATUS_UNSUPPORTED = 4,
  ELLSYM2_STATUS_CONVERGENCE = 5,
  ELLSYM2_STATUS_IO = 6,
  ELLSYM2_STATUS_BUFFER_TOO_SMALL = 7,
  ELLSYM2_STATUS_PANIC = 8,
} Ellsym2Status;

// Precision settings and the lattice `Zτ + Z` the elliptic functions live on.
typedef struct Ellsym2Context Ellsym2Context;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *ellsym2_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ellsym2_version(void);

// Context for `τ = i` (the congruent number curves) at `digits` decimal digits.
//
// # Safety
// `out` must be a valid pointer.
enum Ellsym2Status ellsym2_context_new(uint32_t digits, struct Ellsym2Context **out);

// Context for `τ = tau_re + i·tau_im` with `tau_im > 0`.
//
// # Safety
// `out` must be a valid pointer.
enum Ellsym2Status ellsym2_context_new_tau(uint32_t digits,
                                           double tau_re,
                                           double tau_im,
                                           struct Ellsym2Context **out);

// # Safety
// `ctx` must come from `ellsym2_context_new*` and not be used afterwards.
void ellsym2_context_free(struct Ellsym2Context *ctx);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void ellsym2_string_free(char *s);

// One of `ELLSYM2_FN_*` at the torsion point `(ξ, η)`, rounded to double.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum Ellsym2Status ellsym2_eval(const struct Ellsym2Context *ctx,
                                int function,
                                int64_t xi_num,
                                int64_t xi_den,
                                int64_t eta_num,
                                int64_t eta_den,
                                double *out);

// Like [`ellsym2_eval`] but returns the full-precision decimal string;
// release it with [`ellsym2_string_free`].
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum Ellsym2Status ellsym2_eval_string(const struct Ellsym2Context *ctx,
                                       int function,
                                       int64_t xi_num,
                                       int64_t xi_den,
                                       int64_t eta_num,
                                       int64_t eta_den,
                                       char **out);

// `ℒ₃₁(ξ₁)ℒ₃₂(ξ₂) − ℒ₃₁(ξ₂)ℒ₃₂(ξ₁)` for the two divisors of the main identity.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum Ellsym2Status ellsym2_reg3_det(const struct Ellsym2Context *ctx,
                                    double *out);

// `function` extended linearly to the divisor `Σ coeffs[k]·(ξ_k, η_k)`;
// `points` holds `count` rows of `(ξ_num, ξ_den, η_num, η_den)`.
//
// # Safety
// `ctx` and `out` must be valid; `coeffs` and `points` must hold `count`
// and `4·count` elements.
enum Ellsym2Status ellsym2_eval_divisor(const struct Ellsym2Context *ctx,
                                        int function,
                                        const int64_t *coeffs,
                                        const int64_t *points,
                                        uintptr_t count,
                                        double *out);

// Truncated `K_{a,b}` at `(ξ, η)`, with the bound on the omitted tail.
//
// # Safety
// `ctx`, `re`, `im` and `tail_bound` must be valid pointers.
enum Ellsym2Status ellsym2_kab(const struct Ellsym2Context *ctx,
                               uint32_t a,
                               uint32_t b,
                               int64_t xi_num,
                               int64_t xi_den,
                               int64_t eta_num,
                               int64_t eta_den,
                               uint64_t radius,
                               double *re,
                               double *im,
                               double *tail_bound);

// `L(g, s)` for `s ∈ {1, 2, 3}`.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum Ellsym2Status ellsym2_l_g(const struct Ellsym2Context *ctx, uint32_t s, double *out);

// `L(χ₋₄, t)` for integer `t >= 1`.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum Ellsym2Status ellsym2_l_chi4(const struct Ellsym2Context *ctx, uint32_t t, double *out);

// Writes `a_1..a_n` of `ELLSYM2_FORM_F` or `ELLSYM2_FORM_G` into `out[0..n]`.
//
// # Safety
// `out` must hold `len` elements; `BufferTooSmall` is returned when `len < n`.
enum Ellsym2Status ellsym2_coefficients(int form, uintptr_t n, int64_t *out, uintptr_t len);

// Runs a verification suite by name. `json_lines` receives one JSON report
// per line (release with [`ellsym2_string_free`]); `all_passed` is 1 iff
// every report passed. `radius` and `prime_bound` of 0 select the defaults.
//
// # Safety
// `suite` must be a NUL-terminated string; the out pointers must be valid.
enum Ellsym2Status ellsym2_verify_json(const char *suite,
                                       uint32_t digits,
                                       uint64_t radius,
                                       uint64_t prime_bound,
                                       int quick,
                                       char **json_lines,
                                       int *all_passed);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ELLSYM2_H */
