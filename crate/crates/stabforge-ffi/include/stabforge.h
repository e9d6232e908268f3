#ifndef STABFORGE_H
#define STABFORGE_H

/* Generated by cbindgen from the stabforge-ffi sources. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes shared by every entry point.
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_UTF8 = 2,
  SF_STATUS_INVALID_INPUT = 3,
  SF_STATUS_PARSE = 4,
  SF_STATUS_NON_UNIT = 5,
  SF_STATUS_NOT_A_SQUARE = 6,
  SF_STATUS_INSUFFICIENT_PRECISION = 7,
  SF_STATUS_INDETERMINATE = 8,
  SF_STATUS_UNSUPPORTED = 9,
  SF_STATUS_NOT_APPLICABLE = 10,
  SF_STATUS_BAD_ACTION = 11,
  SF_STATUS_UNKNOWN_NAME = 12,
  SF_STATUS_OUT_OF_RANGE = 13,
  SF_STATUS_PANIC = 99,
} SfStatus;

// An element of an [`SfTower`].
typedef struct SfFieldElem SfFieldElem;

// An element of Z_p known modulo p^N.
typedef struct SfPadic SfPadic;

// A classification report.
typedef struct SfReport SfReport;

// The field Q_p(ζ_{p^α}, ζ_{p^f−1}) at a fixed maximal π-adic precision.
typedef struct SfTower SfTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failed call on this thread, or NULL.
// Free the result with [`sf_string_free`].
char *sf_last_error(void);

// Library version as a static NUL-terminated string.
const char *sf_version(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void sf_string_free(char *s);

// `z mod p^prec` as a new handle.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_padic_from_integer(int64_t z, uint32_t p, uint32_t prec, struct SfPadic **out);

// Parse a digit literal `p:P [d0,d1,...]`.
//
// # Safety
// `literal` must be a NUL-terminated string; `out` must be valid for writes.
enum SfStatus sf_padic_parse(const char *literal, struct SfPadic **out);

// a + b at the smaller precision.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum SfStatus sf_padic_add(const struct SfPadic *a, const struct SfPadic *b, struct SfPadic **out);

// a − b at the smaller precision.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum SfStatus sf_padic_sub(const struct SfPadic *a, const struct SfPadic *b, struct SfPadic **out);

// a · b at the smaller precision.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum SfStatus sf_padic_mul(const struct SfPadic *a, const struct SfPadic *b, struct SfPadic **out);

// a^{-1}; fails with `NonUnit` when p divides a.
//
// # Safety
// `a` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_padic_invert(const struct SfPadic *a, struct SfPadic **out);

// Whether a and b are equal (same prime, precision and value).
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum SfStatus sf_padic_equal(const struct SfPadic *a, const struct SfPadic *b, bool *out);

// Copy up to `cap` base-p digits (least significant first) into `digits`
// and store the precision in `len`. Fails with `OutOfRange` if `cap` is too small.
//
// # Safety
// `a` must be a live handle; `digits` must hold `cap` values; `len` must be valid for writes.
enum SfStatus sf_padic_digits(const struct SfPadic *a,
                              uint32_t *digits,
                              uintptr_t cap,
                              uintptr_t *len);

// The digit literal `p:P [d0,...]`.
//
// # Safety
// `a` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_padic_to_string(const struct SfPadic *a, char **out);

// Release a p-adic handle. NULL is ignored.
//
// # Safety
// `a` must be NULL or a handle from this library that is not used afterwards.
void sf_padic_free(struct SfPadic *a);

// Build Q_p(ζ_{p^α}, ζ_{p^f−1}) supporting π-adic precision up to `max_prec`.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_tower_new(uint32_t p,
                           uintptr_t f,
                           uint32_t alpha,
                           uint32_t max_prec,
                           struct SfTower **out);

// Release a tower handle. Elements keep their own reference to the tower.
//
// # Safety
// `t` must be NULL or a handle from this library that is not used afterwards.
void sf_tower_free(struct SfTower *t);

// ε_α = π^{φ(p^α)}/p at π-adic precision `prec`.
//
// # Safety
// `t` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_epsilon(const struct SfTower *t, uint32_t prec, struct SfFieldElem **out);

// Parse `pi^i * [c0,c1,...] + ...` at π-adic precision `prec`.
//
// # Safety
// `t` must be a live handle; `literal` a NUL-terminated string; `out` valid for writes.
enum SfStatus sf_elem_parse(const struct SfTower *t,
                            const char *literal,
                            uint32_t prec,
                            struct SfFieldElem **out);

// x · y.
//
// # Safety
// `x` and `y` must be live handles over the same tower; `out` must be valid for writes.
enum SfStatus sf_elem_mul(const struct SfFieldElem *x,
                          const struct SfFieldElem *y,
                          struct SfFieldElem **out);

// −x.
//
// # Safety
// `x` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_elem_neg(const struct SfFieldElem *x, struct SfFieldElem **out);

// JSON `{"digits": [...], "precision": n}` of the first `n` π-adic digits,
// each digit a residue vector over F_{p^f}.
//
// # Safety
// `x` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_elem_digits_json(const struct SfFieldElem *x, uint32_t n, char **out);

// The element literal of x.
//
// # Safety
// `x` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_elem_to_string(const struct SfFieldElem *x, char **out);

// Release a field element. NULL is ignored.
//
// # Safety
// `x` must be NULL or a handle from this library that is not used afterwards.
void sf_elem_free(struct SfFieldElem *x);

// Maximal finite subgroups of G_n(u); u is any integer prime to p.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_classify_gn(uint32_t p, uint32_t n, int64_t u, struct SfReport **out);

// Maximal finite subgroups of S_n.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_classify_sn(uint32_t p, uint32_t n, struct SfReport **out);

// Number of maximal classes in the report.
//
// # Safety
// `r` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_report_class_count(const struct SfReport *r, uintptr_t *out);

// Label and order of class `i`. Either out-pointer may be NULL.
//
// # Safety
// `r` must be a live handle; non-NULL out-pointers must be valid for writes.
enum SfStatus sf_report_class(const struct SfReport *r, uintptr_t i, char **label, uint64_t *order);

// The full report as pretty JSON, identical to the CLI output without the trailing newline.
//
// # Safety
// `r` must be a live handle; `out` must be valid for writes.
enum SfStatus sf_report_json(const struct SfReport *r, char **out);

// Release a report. NULL is ignored.
//
// # Safety
// `r` must be NULL or a handle from this library that is not used afterwards.
void sf_report_free(struct SfReport *r);

// Existence, order and label of the extension of T_24 × C_{2^m−1} in G_{2m}(u) at p = 2, as JSON.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_quaternionic_json(uint32_t n,
                                   int64_t u,
                                   char **out);

// Maximal r_1 for F_0 = C_{p^α} × C_d in D_n with S^n = pu.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_r1_max(uint32_t p,
                        uint32_t n,
                        uint32_t alpha,
                        uint64_t d,
                        int64_t u,
                        uint64_t *out);

// Whether ε_α/u is trivial in Z_p(F_0)^×/⟨F_0, (Z_p(F_0)^×)^{r1}⟩.
//
// # Safety
// `out` must be valid for writes.
enum SfStatus sf_epsilon_test(uint32_t p,
                              uint32_t n,
                              uint32_t alpha,
                              uint64_t d,
                              int64_t u,
                              uint64_t r1,
                              bool *out);

// Whether D_m embeds in D_n.
bool sf_hasse_embeds(uint64_t m, uint64_t n);

// Cohomology of C_order acting on Z^rank ⊕ ⊕ Z/torsion[i] as JSON.
// `action` is the k×k matrix in row-major order with k = rank + n_torsion;
// column j is the image of generator j. NULL `action` means the trivial action.
//
// # Safety
// `torsion` must hold `n_torsion` values (or be NULL when it is 0); `action`
// must be NULL or hold k·k values; `out` must be valid for writes.
enum SfStatus sf_cohomology_json(uintptr_t rank,
                                 const uint64_t *torsion,
                                 uintptr_t n_torsion,
                                 const int64_t *action,
                                 uint64_t order,
                                 char **out);

// Run a relation script; `all_hold` receives the overall verdict and
// `report` (may be NULL) the per-check JSON report.
//
// # Safety
// `script` must be a NUL-terminated string; `all_hold` must be valid for
// writes; `report` must be NULL or valid for writes.
enum SfStatus sf_verify_script(const char *script, bool *all_hold, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABFORGE_H */
