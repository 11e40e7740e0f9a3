#ifndef PARAMFOLD_H
#define PARAMFOLD_H

/* C interface to the paramfold library: invariant curves of planar maps at
 * a parabolic fixed point.
 *
 * Every function returning pf_status stores a message retrievable with
 * pf_last_error() on failure (thread-local). Strings returned through
 * char** out-parameters are owned by the caller and released with
 * pf_string_free(). */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(PARAMFOLD_BUILDING_LIBRARY)
#define PF_API __attribute__((visibility("default")))
#else
#define PF_API
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_INPUT = 1,      /* malformed map or file */
  PF_ERR_HYPOTHESIS = 2, /* the map does not satisfy the construction's hypotheses */
  PF_ERR_NUMERIC = 3,    /* non-convergence, domain exit, ... */
  PF_ERR_ARGUMENT = 4    /* invalid arguments */
} pf_status;

typedef enum pf_branch { PF_STABLE = 0, PF_UNSTABLE = 1 } pf_branch;
typedef enum pf_family { PF_PRIMARY = 0, PF_SECONDARY = 1 } pf_family;

typedef struct pf_map pf_map;
typedef struct pf_curve pf_curve;

typedef struct pf_options {
  pf_branch branch;
  pf_family family;
  int order;          /* approximation order n */
  double rho;         /* local interval; <= 0 selects it automatically */
  double tol;         /* Picard stopping tolerance on the node change */
  int m;              /* Chebyshev nodes */
  double tie_break_x; /* free K^x coefficient at the singular step */
  int use_gamma;      /* nonzero: refine the rescaled map */
} pf_options;

typedef void (*pf_sweep_callback)(int sweep, double sup_change, double residual_sup, void* user);

PF_API const char* pf_version(void);
PF_API const char* pf_last_error(void);
PF_API void pf_string_free(char* s);
PF_API void pf_options_default(pf_options* opts);

PF_API pf_status pf_map_from_json(const char* text, pf_map** out);
PF_API pf_status pf_map_from_file(const char* path, pf_map** out);
PF_API void pf_map_free(pf_map* map);
/* Canonical JSON of the map spec. */
PF_API pf_status pf_map_to_json(const pf_map* map, char** out);

/* Reduced map, case, k, a_k and hypothesis reports for both branches.
 * Succeeds for maps that do not classify (case is null). */
PF_API pf_status pf_classify(const pf_map* map, char** out_json);
/* Parameterization of order opts->order with the residual orders. */
PF_API pf_status pf_approx(const pf_map* map, const pf_options* opts, char** out_json);
/* Residual jets and pointwise residual at n_samples log-spaced t in (0, rho). */
PF_API pf_status pf_residual(const pf_map* map, const pf_options* opts, double rho, int n_samples,
                             char** out_json);

PF_API pf_status pf_refine(const pf_map* map, const pf_options* opts, pf_sweep_callback cb,
                           void* user, pf_curve** out);
PF_API void pf_curve_free(pf_curve* curve);
PF_API double pf_curve_rho(const pf_curve* curve);
/* Refinement state and parameterization as JSON. */
PF_API pf_status pf_curve_state(const pf_curve* curve, char** out_json);
/* Point in input coordinates (globalized beyond rho) and its invariance
 * residual F(K(t)) - K(R(t)). Either residual pointer may be NULL. */
PF_API pf_status pf_curve_eval(const pf_curve* curve, double t, double* x, double* y,
                               double* res_x, double* res_y);
/* Curve samples at t = tmax / 1.2^i. format: "csv" or "json". On a
 * failure part way the rows computed so far are returned in *out together
 * with PF_ERR_NUMERIC. */
PF_API pf_status pf_curve_samples(const pf_curve* curve, double tmax, int samples,
                                  const char* format, char** out);

#ifdef __cplusplus
}
#endif

#endif
