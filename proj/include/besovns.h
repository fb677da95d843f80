/* besovns: spectral Besov-Lorentz / Navier-Stokes toolkit, C API.
 *
 * All functions return BNS_OK (0) on success, BNS_EINVAL (1) on contract
 * violations, BNS_ENUMERIC (2) on numerical failure; bns_last_error() gives
 * the message for the calling thread. Objects returned through out-pointers
 * are owned by the caller and released with the matching _free; strings are
 * released with bns_free_string.
 */
#ifndef BESOVNS_H
#define BESOVNS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BNS_OK 0
#define BNS_EINVAL 1
#define BNS_ENUMERIC 2

typedef struct bns_field bns_field;     /* grid or spectral torus field */
typedef struct bns_wavelet bns_wavelet; /* Meyer window system */
typedef struct bns_coeffs bns_coeffs;   /* wavelet coefficients, per component */
typedef struct bns_traj bns_traj;       /* ring-sampled trajectory */

/* q and r may be HUGE_VAL for infinity; s_is_set = 0 means s = n/p - 1. */
typedef struct bns_space_params {
    double p, q, r, s, m, mprime;
    int s_is_set;
} bns_space_params;

typedef struct bns_solver_config {
    int n, J;
    int ring_lo, ring_hi;
    int samples_per_ring;
    int quad_samples;
    int max_iter;
    double tol;
    bns_space_params space;
} bns_solver_config;

const char* bns_version(void);
const char* bns_last_error(void);
void bns_free_string(char* s);

/* -- fields ---------------------------------------------------------------- */

int bns_field_load(const char* path, bns_field** out);
int bns_field_save(const bns_field* f, const char* path); /* BNF1 */
void bns_field_free(bns_field* f);
int bns_field_info(const bns_field* f, int* n, long* N, int* c, int* spectral);
int bns_field_clone(const bns_field* f, bns_field** out);
int bns_field_scale(bns_field* f, double factor);
int bns_field_l2(const bns_field* f, double* out);
int bns_field_divergence(const bns_field* f, double* out);
int bns_field_to_spectral(const bns_field* f, bns_field** out);
int bns_field_to_grid(const bns_field* f, bns_field** out);

int bns_field_taylor_green(long N, bns_field** out);
int bns_field_random_divfree(int n, long N, unsigned long long seed, long kmax,
                             double amplitude, bns_field** out);
int bns_field_random_scalar(int n, long N, unsigned long long seed, long kmax,
                            double amplitude, bns_field** out);

/* -- wavelets and norms ------------------------------------------------------ */

int bns_wavelet_build(int n, int J, const char* profile, bns_wavelet** out);
void bns_wavelet_free(bns_wavelet* w);

int bns_analyze(const bns_field* f, const bns_wavelet* w, bns_coeffs** out);
int bns_synthesize(const bns_coeffs* c, const bns_wavelet* w, bns_field** out);
int bns_coeffs_save(const bns_coeffs* c, const char* path); /* BNC1, first component */
int bns_coeffs_load(const char* path, bns_coeffs** out);
void bns_coeffs_free(bns_coeffs* c);

/* JSON object {besov, besov_lorentz, tll, per_band:[...]} */
int bns_norms_json(const bns_coeffs* c, const bns_space_params* p, char** json_out);

/* -- trajectories ------------------------------------------------------------ */

int bns_heat_flow(const bns_field* f, const double* times, int ntimes, bns_traj** out);
int bns_heat_flow_rings(const bns_field* f, int ring_lo, int ring_hi, int samples_per_ring,
                        bns_traj** out);
int bns_traj_load(const char* manifest_path, bns_traj** out);
int bns_traj_save(const bns_traj* t, const char* manifest_path, const char* prefix);
void bns_traj_free(bns_traj* t);
int bns_traj_count(const bns_traj* t, int* out);
int bns_traj_time(const bns_traj* t, int i, double* out);
int bns_traj_field(const bns_traj* t, int i, bns_field** out);

/* microlocal norm of Definition 3.2 */
int bns_traj_microlocal(const bns_traj* t, const bns_space_params* p, double* out);
/* JSON {microlocal, per_ring:[...], decay:[...], fit:{c_tilde, ...}} */
int bns_traj_norms_json(const bns_traj* t, const bns_space_params* p, char** json_out);

/* -- flows -------------------------------------------------------------------- */

#define BNS_FLOW_PARAPRODUCT 0
#define BNS_FLOW_COUPLE 1
#define BNS_FLOW_BILINEAR 2

#define BNS_OP_GRAD 0        /* A_l */
#define BNS_OP_TRIPLE 1      /* A_{l,l',l''} */

/* axes are 1-based; axes[1..2] only used by BNS_OP_TRIPLE. diag_json_out may
 * be NULL; otherwise receives {support_out_of_ring, divergence, ...}. */
int bns_flow_apply(const bns_traj* u, const bns_traj* v, double t, int flow, int op,
                   const int axes[3], int quad_samples, bns_field** out, char** diag_json_out);

/* -- solver -------------------------------------------------------------------- */

/* report_jsonl_out: one JSON line per Picard step. converged_out: 1/0. */
int bns_picard_solve(const bns_field* f, const bns_solver_config* cfg, bns_traj** out,
                     char** report_jsonl_out, int* converged_out);
int bns_rk4_reference(const bns_field* f, const bns_solver_config* cfg, bns_traj** out);
int bns_mild_residual(const bns_traj* u, const bns_field* f, int quad_samples, double* out);
/* CSV "t,l2_picard,l2_rk4,rel_discrepancy" per stored time. */
int bns_oracle_compare_csv(const bns_field* f, const bns_solver_config* cfg, char** csv_out);

/* Runs the compact invariant suites; BNS_OK when all pass. */
int bns_selftest(char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* BESOVNS_H */
