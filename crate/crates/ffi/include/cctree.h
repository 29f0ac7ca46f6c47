#ifndef CCTREE_H
#define CCTREE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CctreeStatus {
  CCTREE_STATUS_OK = 0,
  CCTREE_STATUS_NULL_POINTER = 1,
  CCTREE_STATUS_INVALID_PARAMETER = 2,
  CCTREE_STATUS_DOMAIN = 3,
  CCTREE_STATUS_PRECISION = 4,
  CCTREE_STATUS_OVERFLOW = 5,
  CCTREE_STATUS_HYPOTHESIS = 6,
  CCTREE_STATUS_NO_ROOT = 7,
  CCTREE_STATUS_CONSISTENCY = 8,
  CCTREE_STATUS_PANIC = 9,
} CctreeStatus;

typedef enum CctreeGrowth {
  CCTREE_GROWTH_POISSON = 0,
  CCTREE_GROWTH_YULE = 1,
} CctreeGrowth;

typedef enum CctreeCatastrophe {
  CCTREE_CATASTROPHE_GEOMETRIC = 0,
  CCTREE_CATASTROPHE_BINOMIAL = 1,
} CctreeCatastrophe;

typedef enum CctreeProvenance {
  CCTREE_PROVENANCE_U_INTERIOR = 0,
  CCTREE_PROVENANCE_U_ROOT = 1,
  CCTREE_PROVENANCE_L_INTERIOR = 2,
  CCTREE_PROVENANCE_L_ROOT = 3,
} CctreeProvenance;

typedef enum CctreePhase {
  CCTREE_PHASE_EXTINCT_CERTIFIED = 0,
  CCTREE_PHASE_SURVIVES_CERTIFIED = 1,
  CCTREE_PHASE_UNDETERMINED = 2,
} CctreePhase;

typedef enum CctreeVariant {
  CCTREE_VARIANT_ORIGINAL = 0,
  CCTREE_VARIANT_SELF_AVOIDING = 1,
  CCTREE_VARIANT_FORWARD_OR_DIE = 2,
} CctreeVariant;

typedef enum CctreeRootKind {
  CCTREE_ROOT_KIND_FULL_TREE = 0,
  CCTREE_ROOT_KIND_ROOTED_TREE = 1,
} CctreeRootKind;

/**
 * Opaque survivor law.
 */
typedef struct CctreeLaw CctreeLaw;

/**
 * Opaque offspring law.
 */
typedef struct CctreeOffspring CctreeOffspring;

typedef struct CctreeSurvivalBounds {
  double lower;
  double upper;
  double psi;
  double rho;
} CctreeSurvivalBounds;

/**
 * Critical-curve roots in λ at fixed p. A side without a root has its
 * `*_found` flag cleared and its value set to NaN.
 */
typedef struct CctreeCurveBounds {
  double lower;
  double upper;
  bool lower_found;
  bool upper_found;
} CctreeCurveBounds;

typedef struct CctreeHorizon {
  uint64_t max_events;
  uint64_t max_colonies_alive;
  uint64_t max_depth;
} CctreeHorizon;

typedef struct CctreeSimSummary {
  uint64_t replications;
  uint64_t extinct;
  uint64_t censored;
  /**
   * Censored fraction and its Wilson 99% interval.
   */
  double survival;
  double survival_lower;
  double survival_upper;
  /**
   * Means over extinct replications; NaN if there were none.
   */
  double colonies_mean;
  double reach_mean;
} CctreeSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into this library.
 */
const char *cctree_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cctree_version(void);

/**
 * Creates a survivor law. Only Poisson/geometric and Yule/binomial are
 * available.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CctreeStatus cctree_law_new(enum CctreeGrowth growth,
                                 enum CctreeCatastrophe catastrophe,
                                 double lambda,
                                 double p,
                                 struct CctreeLaw **out);

/**
 * Releases a law; null is ignored.
 *
 * # Safety
 * `law` must come from [`cctree_law_new`] and not be used afterwards.
 */
void cctree_law_free(struct CctreeLaw *law);

/**
 * `E[s^N]` for `s` in `[0, 1]`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_law_pgf(const struct CctreeLaw *law, double s, double *out);

/**
 * `P(N = n)`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_law_pmf(const struct CctreeLaw *law, uint64_t n, double *out);

/**
 * `E(N)`; `INFINITY` when the mean is infinite.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_law_mean(const struct CctreeLaw *law, double *out);

/**
 * Builds the offspring law of a comparison process.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_offspring_build(enum CctreeProvenance provenance,
                                         uint32_t d,
                                         const struct CctreeLaw *law,
                                         struct CctreeOffspring **out);

/**
 * Releases an offspring law; null is ignored.
 *
 * # Safety
 * `ol` must come from [`cctree_offspring_build`] and not be used
 * afterwards.
 */
void cctree_offspring_free(struct CctreeOffspring *ol);

/**
 * Number of support points, `max Y + 1`.
 *
 * # Safety
 * `ol` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_offspring_len(const struct CctreeOffspring *ol, size_t *out);

/**
 * Copies `min(len, support)` probabilities into `buf`.
 *
 * # Safety
 * `ol` must be a live handle and `buf` valid for `len` writes.
 */
enum CctreeStatus cctree_offspring_probs(const struct CctreeOffspring *ol, double *buf, size_t len);

/**
 * `E[s^Y]`.
 *
 * # Safety
 * `ol` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_offspring_pgf(const struct CctreeOffspring *ol, double s, double *out);

/**
 * Phase class from the survivor pgf at `d/(d+1)`.
 *
 * # Safety
 * `law` must be a live handle; `kind` writable; `pgf_value` may be null.
 */
enum CctreeStatus cctree_classify_phase(uint32_t d,
                                        const struct CctreeLaw *law,
                                        enum CctreePhase *kind,
                                        double *pgf_value);

/**
 * Survival sandwich on the tree of degree `d`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_survival_bounds(uint32_t d,
                                         const struct CctreeLaw *law,
                                         struct CctreeSurvivalBounds *out);

/**
 * Large-`d` survival limit `1 - ν`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_survival_limit(const struct CctreeLaw *law, double *out);

/**
 * Critical-curve bounds in λ at fixed `p`. `yule` selects Yule/binomial
 * over Poisson/geometric; `pgf_form` solves the direct pgf inequality
 * instead of the hypergeometric closed form.
 *
 * # Safety
 * `out` must be writable.
 */
enum CctreeStatus cctree_critical_curve(uint32_t d,
                                        bool yule,
                                        double p,
                                        bool pgf_form,
                                        struct CctreeCurveBounds *out);

/**
 * Bounds on `P(M_d <= m)`; fails with `Hypothesis` outside the
 * subcritical regime.
 *
 * # Safety
 * `law` must be a live handle; `lower` and `upper` writable.
 */
enum CctreeStatus cctree_reach_cdf_bounds(uint32_t d,
                                          const struct CctreeLaw *law,
                                          uint64_t m,
                                          double *lower,
                                          double *upper);

/**
 * Large-`d` limit of `P(M_d <= m)`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_reach_limit_cdf(const struct CctreeLaw *law, uint64_t m, double *out);

/**
 * Bounds on the expected number of colonies.
 *
 * # Safety
 * `law` must be a live handle; `lower` and `upper` writable.
 */
enum CctreeStatus cctree_colony_bounds(uint32_t d,
                                       const struct CctreeLaw *law,
                                       double *lower,
                                       double *upper);

/**
 * Default simulation horizon.
 */
struct CctreeHorizon cctree_default_horizon(void);

/**
 * Runs `replications` replications and summarizes them. Deterministic in
 * `(seed, arguments)`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum CctreeStatus cctree_simulate(uint32_t d,
                                  const struct CctreeLaw *law,
                                  enum CctreeVariant variant,
                                  enum CctreeRootKind root_kind,
                                  struct CctreeHorizon horizon,
                                  uint64_t seed,
                                  uint64_t replications,
                                  struct CctreeSimSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCTREE_H */
