#ifndef APOLLONIAN_H
#define APOLLONIAN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ApoStatus {
  APO_STATUS_OK = 0,
  APO_STATUS_NULL_POINTER = 1,
  APO_STATUS_INVALID_ARGUMENT = 2,
  APO_STATUS_NOT_DESCARTES = 3,
  APO_STATUS_OVERFLOW = 4,
  APO_STATUS_SIZE_CAP = 5,
  APO_STATUS_NO_CONVERGENCE = 6,
  APO_STATUS_BUFFER_TOO_SMALL = 7,
  APO_STATUS_INTERNAL = 8,
} ApoStatus;

/**
 * Enumerated packing; opaque to C.
 */
typedef struct ApoOrbit ApoOrbit;

typedef struct ApoRect {
  double x_min;
  double x_max;
  double y_min;
  double y_max;
} ApoRect;

typedef struct ApoFit {
  double alpha_hat;
  double std_error;
  double c_hat;
  size_t points;
} ApoFit;

/**
 * Spectral summary of the Cayley graph modulo `q`. Quantities that are
 * undefined (a single vertex) are NaN.
 */
typedef struct ApoSpectrum {
  size_t group_order;
  double lambda0;
  double lambda1;
  double lambda_min;
  double cheeger_lower;
  double cheeger_upper;
  size_t components;
} ApoSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *apo_last_error_message(void);

/**
 * `Q(v) = 2Σv² − (Σv)²`.
 *
 * # Safety
 * `v` points to four `int64_t`; `out` is writable.
 */
enum ApoStatus apo_descartes_form(const int64_t *v, int64_t *out);

/**
 * Root quadruple of the packing through `v`.
 *
 * # Safety
 * `v` points to four readable and `out` to four writable `int64_t`.
 */
enum ApoStatus apo_reduce_to_root(const int64_t *v, int64_t *out);

/**
 * Whether the curvatures of `v` have gcd 1.
 *
 * # Safety
 * `v` points to four `int64_t`; `out` is writable.
 */
enum ApoStatus apo_is_primitive(const int64_t *v, bool *out);

/**
 * Enumerates every circle with unsigned curvature at most `bound`.
 * `region` may be null; unbounded packings require it and a known
 * placement, currently the strip root `(0, 0, 1, 1)`.
 *
 * # Safety
 * `root` points to four `int64_t`, `region` is null or valid, `out` is
 * writable. Free the handle with [`apo_orbit_free`].
 */
enum ApoStatus apo_orbit_enumerate(const int64_t *root,
                                   int64_t bound,
                                   const struct ApoRect *region,
                                   struct ApoOrbit **out);

/**
 * # Safety
 * `orbit` is null or a handle from [`apo_orbit_enumerate`] not yet freed.
 */
void apo_orbit_free(struct ApoOrbit *orbit);

/**
 * Number of circles in the orbit; 0 for a null handle.
 *
 * # Safety
 * `orbit` is null or a live handle.
 */
size_t apo_orbit_circle_count(const struct ApoOrbit *orbit);

/**
 * Number of quadruples visited; 0 for a null handle.
 *
 * # Safety
 * `orbit` is null or a live handle.
 */
uint64_t apo_orbit_quad_count(const struct ApoOrbit *orbit);

/**
 * Copies the sorted unsigned curvatures into `buf`. `written` receives the
 * full count; when `len` is too small nothing is copied and the status is
 * `BufferTooSmall`.
 *
 * # Safety
 * `orbit` is a live handle, `buf` has room for `len` values (or is null
 * with `len == 0`), `written` is writable.
 */
enum ApoStatus apo_orbit_curvatures(const struct ApoOrbit *orbit,
                                    uint64_t *buf,
                                    size_t len,
                                    size_t *written);

/**
 * Least-squares exponent of `N(T)` over `points` log-spaced bounds in
 * `[t_min, t_max]` for a bounded root quadruple.
 *
 * # Safety
 * `root` points to four `int64_t`; `out` is writable.
 */
enum ApoStatus apo_fit_exponent(const int64_t *root,
                                double t_min,
                                double t_max,
                                size_t points,
                                struct ApoFit *out);

/**
 * Adjacency spectrum of the Cayley graph of the group reduced modulo `q`
 * (`1 ≤ q ≤ 255`).
 *
 * # Safety
 * `out` is writable.
 */
enum ApoStatus apo_spectrum_mod(uint32_t q, struct ApoSpectrum *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APOLLONIAN_H */
