/* C interface to the vlaser solver library.
 *
 * All entry points return a vlaser_status; on failure the thread-local
 * message from vlaser_last_error() describes what went wrong.  Configs are
 * opaque handles carrying the same keys as the config-file format
 * ("key = value" lines, '#' comments); see the README for the key list and
 * the output schemas of vlaser_run().
 */
#ifndef VLASER_H
#define VLASER_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vlaser_status {
  VLASER_OK = 0,
  VLASER_ERR_INVALID_ARGUMENT = 1, /* bad pointer, key, value, or config state */
  VLASER_ERR_PARSE = 2,            /* malformed config text */
  VLASER_ERR_SOLVER = 3,           /* iteration failed to converge / no solution */
  VLASER_ERR_IO = 4                /* unreadable input or unwritable output */
} vlaser_status;

typedef struct vlaser_config vlaser_config;

/* Construction and ownership.  Every successfully created config must be
 * released with vlaser_config_free (NULL is tolerated). */
vlaser_config* vlaser_config_new(void); /* all defaults, NULL on allocation failure */
vlaser_status vlaser_config_parse_file(const char* path, vlaser_config** out);
vlaser_status vlaser_config_parse_string(const char* text, vlaser_config** out);
void vlaser_config_free(vlaser_config* cfg);

/* Key-level access using config-file keys and value spellings.  get writes
 * the canonical value text NUL-terminated into buf; a buffer too small for
 * the full value fails with VLASER_ERR_INVALID_ARGUMENT. */
vlaser_status vlaser_config_set(vlaser_config* cfg, const char* key,
                                const char* value);
vlaser_status vlaser_config_get(const vlaser_config* cfg, const char* key, char* buf,
                                size_t buf_len);

/* Execute the configured mode and write the result table to the config's
 * `out` path (stdout when empty) in its `format`. */
vlaser_status vlaser_run(const vlaser_config* cfg);

/* Value-struct results for the single-point solvers. */

typedef struct vlaser_steady_result {
  double re_alpha, im_alpha;     /* stationary cavity field */
  double rho_gg, rho_ee, rho_aa; /* level populations */
  double re_rho_eg, im_rho_eg;   /* lasing-transition coherence */
  int converged;
  double residual;
  int iterations;
} vlaser_steady_result;

typedef struct vlaser_stability_result {
  double re_s0, im_s0; /* dispersion root with the largest real part */
  int unstable;        /* 1 when re_s0 > 0 (lasing onset) */
  int n_roots;         /* accepted dispersion roots */
} vlaser_stability_result;

typedef struct vlaser_floquet_result {
  int is_lasing;
  double abs_alpha_m1, abs_alpha_0, abs_alpha_p1; /* harmonic magnitudes */
  double omega;                                   /* lasing frequency; 0 when not lasing */
  double avg_intensity;                           /* cycle-averaged |alpha|^2 */
  int converged;
  double residual;
  int iterations;
} vlaser_floquet_result;

typedef struct vlaser_estimates_result {
  double gamma_eff;
  double threshold_population;
  double ac_stark_shift;
  double qualitative_threshold_n;
} vlaser_estimates_result;

vlaser_status vlaser_solve_steady(const vlaser_config* cfg, vlaser_steady_result* out);
vlaser_status vlaser_solve_stability(const vlaser_config* cfg,
                                     vlaser_stability_result* out);
vlaser_status vlaser_solve_floquet(const vlaser_config* cfg,
                                   vlaser_floquet_result* out);
vlaser_status vlaser_estimates(const vlaser_config* cfg, vlaser_estimates_result* out);

/* Bisect the instability edge along the configured threshold axis. */
vlaser_status vlaser_threshold(const vlaser_config* cfg, double* critical_value);

/* Message from the most recent failing call on this thread ("" when none). */
const char* vlaser_last_error(void);

/* Stable name for a status code, e.g. "VLASER_ERR_PARSE". */
const char* vlaser_status_name(vlaser_status s);

#ifdef __cplusplus
}
#endif

#endif /* VLASER_H */
