/* C interface of the cvqkd secret-key-rate calculator.
 *
 * Maintained by hand in cbindgen layout; keep in sync with src/lib.rs.
 *
 * All computations use shot-noise units with vacuum variance 1, fiber
 * transmissivity T = 10^(-loss_db_per_km * distance_km / 10), detector
 * efficiency folded into the channel loss, excess noise referred to the
 * channel input with the added-variance sign, and base-2 logarithms
 * (rates in bits per pulse).
 */

#ifndef CVQKD_H
#define CVQKD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every entry point. */
typedef enum CvqkdStatus {
  /* Success. */
  CVQKD_STATUS_OK = 0,
  /* A required pointer was null. */
  CVQKD_STATUS_NULL_POINTER = 1,
  /* A parameter was out of range or non-finite. */
  CVQKD_STATUS_INVALID_ARGUMENT = 2,
  /* The key rate is nonpositive over the whole search interval. */
  CVQKD_STATUS_NO_SECURE_POINT = 3,
  /* Internal numerical failure. */
  CVQKD_STATUS_NUMERICAL = 4,
} CvqkdStatus;

/* Protocol selectors. */
#define CVQKD_PROTOCOL_PASCS 0
#define CVQKD_PROTOCOL_COHERENT 1

/* Cutoff rules for cvqkd_sweep_cutoff_km. */
#define CVQKD_CUTOFF_POSITIVE 0
#define CVQKD_CUTOFF_KMIN 1

/* One evaluated operating point. */
typedef struct CvqkdRatePoint {
  double distance_km;
  double transmissivity;
  double excess_noise;
  double alpha;
  double v_a;          /* modulation variance V_A */
  double z;            /* Alice-Bob correlation */
  double v_a_given_b;  /* conditional variance after homodyne */
  double i_ab_bits;    /* Shannon mutual information */
  double s_be_bits;    /* Holevo bound on Eve */
  double key_rate_bits; /* beta * i_ab - s_be */
  double nu1;          /* symplectic eigenvalues */
  double nu2;
  double nu3;
} CvqkdRatePoint;

/* Opaque sweep result; free with cvqkd_sweep_free. */
typedef struct CvqkdSweep CvqkdSweep;

/* Library version as a static NUL-terminated string. */
const char *cvqkd_version(void);

/* Evaluates the secret key rate of a four-state protocol at one
 * operating point. `protocol` is CVQKD_PROTOCOL_PASCS or
 * CVQKD_PROTOCOL_COHERENT. */
CvqkdStatus cvqkd_key_rate(int protocol,
                           double alpha,
                           double distance_km,
                           double loss_db_per_km,
                           double xi,
                           double beta,
                           double eta_det,
                           CvqkdRatePoint *out);

/* Finds the amplitude maximizing the key rate on [alpha_lo, alpha_hi]
 * to tolerance `tol`. Returns CVQKD_STATUS_NO_SECURE_POINT when the rate
 * is nonpositive over the whole interval. */
CvqkdStatus cvqkd_optimize_alpha(int protocol,
                                 double distance_km,
                                 double loss_db_per_km,
                                 double xi,
                                 double beta,
                                 double eta_det,
                                 double alpha_lo,
                                 double alpha_hi,
                                 double tol,
                                 double *out_alpha,
                                 double *out_key_rate);

/* Sweeps the key rate over the distance grid start..stop (step `step_km`)
 * at fixed excess noise and stores an opaque handle in *out. */
CvqkdStatus cvqkd_sweep_new(int protocol,
                            double alpha,
                            double start_km,
                            double stop_km,
                            double step_km,
                            double loss_db_per_km,
                            double xi,
                            double beta,
                            double eta_det,
                            double k_min,
                            CvqkdSweep **out);

/* Number of points in the sweep; 0 for a null handle. */
size_t cvqkd_sweep_point_count(const CvqkdSweep *sweep);

/* Copies point `index` into *out. */
CvqkdStatus cvqkd_sweep_point(const CvqkdSweep *sweep,
                              size_t index,
                              CvqkdRatePoint *out);

/* Cutoff distance under the given rule (macros above). Writes -1.0 when
 * the curve starts below the rule already. */
CvqkdStatus cvqkd_sweep_cutoff_km(const CvqkdSweep *sweep,
                                  int rule,
                                  double *out_km);

/* Frees a sweep handle; null is a no-op. */
void cvqkd_sweep_free(CvqkdSweep *sweep);

/* Runs the cross-path consistency battery under default conventions. */
CvqkdStatus cvqkd_selftest(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CVQKD_H */
