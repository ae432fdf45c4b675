#ifndef ACSTK_H
#define ACSTK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum AcstkStatus {
  ACSTK_STATUS_OK = 0,
  // Malformed input: bad JSON, wrong shapes, failed structural checks.
  ACSTK_STATUS_VALIDATION = 1,
  // Singular or ill-conditioned computation.
  ACSTK_STATUS_NUMERICAL = 2,
  // A search exhausted its budget.
  ACSTK_STATUS_SEARCH = 3,
  // A required pointer argument was null.
  ACSTK_STATUS_NULL_POINTER = 4,
  // An output buffer was too small.
  ACSTK_STATUS_BUFFER_TOO_SMALL = 5,
  // Internal panic caught at the boundary.
  ACSTK_STATUS_PANIC = 6,
} AcstkStatus;

// Almost complex structure handle.
typedef struct AcstkAcs AcstkAcs;

// Lie algebra handle.
typedef struct AcstkAlgebra AcstkAlgebra;

// Invariants of an invariant structure.
typedef struct AcstkInvariants {
  size_t b1;
  size_t h1_ddc;
  size_t method_a;
  size_t method_b;
  size_t rank;
} AcstkInvariants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Free with
// [`acstk_string_free`].
char *acstk_last_error_message(void);

// # Safety
// `s` must come from this library and not have been freed.
void acstk_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *acstk_version(void);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum AcstkStatus acstk_algebra_from_json(const char *json, struct AcstkAlgebra **out);

// Built-in algebra by name (`abelian<2m>`, `heis3xR3`, `free2step3gen`).
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum AcstkStatus acstk_algebra_catalog(const char *name, struct AcstkAlgebra **out);

// Dimension of the algebra, or 0 for NULL.
//
// # Safety
// `g` must be NULL or a live handle.
size_t acstk_algebra_dim(const struct AcstkAlgebra *g);

// # Safety
// `g` must be NULL or a handle from this library, not yet freed.
void acstk_algebra_free(struct AcstkAlgebra *g);

// Structure from a row-major `dim × dim` matrix with `J² = −I`.
//
// # Safety
// `data` must point to `dim * dim` doubles; `out` must be writable.
enum AcstkStatus acstk_acs_new(const double *data, size_t dim, struct AcstkAcs **out);

// Built-in structure by name (`jstd<2m>`, `ja`, `jb`).
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum AcstkStatus acstk_acs_catalog(const char *name, struct AcstkAcs **out);

// Seeded random structure.
//
// # Safety
// `out` must be writable.
enum AcstkStatus acstk_acs_random(size_t dim, uint64_t seed, bool flipped, struct AcstkAcs **out);

// Dimension of the structure, or 0 for NULL.
//
// # Safety
// `j` must be NULL or a live handle.
size_t acstk_acs_dim(const struct AcstkAcs *j);

// Copy the matrix, row-major, into `out` (`len ≥ dim²`).
//
// # Safety
// `j` must be a live handle; `out` must have room for `len` doubles.
enum AcstkStatus acstk_acs_matrix(const struct AcstkAcs *j, double *out, size_t len);

// # Safety
// `j` must be NULL or a handle from this library, not yet freed.
void acstk_acs_free(struct AcstkAcs *j);

// Complex rank of the Nijenhuis tensor.
//
// # Safety
// Handles must be live; `out_rank` must be writable.
enum AcstkStatus acstk_complex_rank(const struct AcstkAlgebra *g,
                                    const struct AcstkAcs *j,
                                    double tol_rel,
                                    double tol_abs,
                                    size_t *out_rank);

// Nijenhuis tensor components, `out[(i * dim + j) * dim + k] = N^k_{ij}`
// (`len ≥ dim³`).
//
// # Safety
// Handles must be live; `out` must have room for `len` doubles.
enum AcstkStatus acstk_nijenhuis(const struct AcstkAlgebra *g,
                                 const struct AcstkAcs *j,
                                 double *out,
                                 size_t len);

// `(I + L) J₀ (I + L)⁻¹` for a row-major `L` anti-commuting with `J₀`.
//
// # Safety
// `j0` must be live; `l` must point to `dim²` doubles; `out` must be writable.
enum AcstkStatus acstk_deform(const struct AcstkAcs *j0, const double *l, struct AcstkAcs **out);

// `L = (I − J₀J₁)⁻¹(I + J₀J₁)`, row-major into `out` (`len ≥ dim²`).
//
// # Safety
// Handles must be live; `out` must have room for `len` doubles.
enum AcstkStatus acstk_recover_l(const struct AcstkAcs *j0,
                                 const struct AcstkAcs *j1,
                                 double *out,
                                 size_t len);

// Operator-norm distance `‖J₀ − J₁‖`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum AcstkStatus acstk_c0_distance(const struct AcstkAcs *j0,
                                   const struct AcstkAcs *j1,
                                   double *out);

// `h¹_{d+d^c}`, `b₁` and the complex rank, at default rank tolerances.
//
// # Safety
// Handles must be live; `out` must be writable.
enum AcstkStatus acstk_invariants(const struct AcstkAlgebra *g,
                                  const struct AcstkAcs *j,
                                  struct AcstkInvariants *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACSTK_H */
