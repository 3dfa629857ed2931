/*
 * C API for the parabolic Anderson model toolkit: opaque handles, integer
 * error codes, plain-old-data results.  Every function returns PAM_OK on
 * success; on failure pam_last_error_message() describes the problem for the
 * calling thread.
 */
#ifndef PAM_PAM_H
#define PAM_PAM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum pam_status {
    PAM_OK = 0,
    PAM_ERR_INVALID_ARGUMENT = 1,
    PAM_ERR_NUMERICAL = 2,
    PAM_ERR_UNSUPPORTED = 3,
    PAM_ERR_NOMEM = 4,
    PAM_ERR_IO = 5,
    PAM_ERR_INTERNAL = 6
};

typedef struct pam_model pam_model;
typedef struct pam_kernel_table pam_kernel_table;
typedef struct pam_noise_basis pam_noise_basis;

typedef struct pam_quadrature_options {
    int node_count;           /* >= 8 */
    double abs_tol;           /* > 0 */
    double rel_tol;           /* > 0 */
    double singularity_split; /* in (0,1) */
} pam_quadrature_options;

const char* pam_last_error_message(void);
void pam_quadrature_options_default(pam_quadrature_options* opts);

/* ---- models ---------------------------------------------------------- */

int pam_model_create(int dimension, double alpha, double beta,
                     const pam_quadrature_options* quad /* nullable */, pam_model** out);
void pam_model_free(pam_model* model);

int pam_gamma_eval(const pam_model* model, double t, double* out);
int pam_covariance_mass(const pam_model* model, double t, double* out);
int pam_dalang_integral(const pam_model* model, double* out);
int pam_holder_integral(const pam_model* model, double eta, double* out);
int pam_minimal_eta(const pam_model* model, double* out);

/* ---- kernels --------------------------------------------------------- */

int pam_propagator_energy(const pam_model* model, double t, double* out);
int pam_propagator_energy_quadrature(const pam_model* model, double t, double* out);
int pam_convolution_power(const pam_model* model, int order, double t, double* out);
int pam_holder_energy_integral(const pam_model* model, double eta, double* out);
int pam_weighted_energy_integral(const pam_model* model, double t, double theta, double* out);

int pam_kernel_table_build(const pam_model* model, int n_max, double horizon, int n_grid,
                           pam_kernel_table** out);
void pam_kernel_table_free(pam_kernel_table* table);
int pam_kernel_table_size(const pam_kernel_table* table, int* n_grid, int* n_max);
int pam_kernel_table_row(const pam_kernel_table* table, int index, double* t, double* k,
                         double* h_values /* length n_max */);
int pam_kernel_table_write_csv(const pam_kernel_table* table, const char* path,
                               int include_selftest);

int pam_moment_series(const pam_model* model, double t, double weight, double tol,
                      double* value, int* truncation_index);
int pam_moment_series_sqrt(const pam_model* model, double t, double weight, double tol,
                           double* value, int* truncation_index);

/* ---- chaos moments ---------------------------------------------------- */

int pam_chaos1_second_moment(const pam_model* model, double t, double* out);
int pam_chaos1_time_increment(const pam_model* model, double t0, double t1, double* out);
int pam_chaos1_space_increment(const pam_model* model, double t, const double* z, int z_len,
                               double* out);
int pam_chaos2_second_moment_qmc(const pam_model* model, double t, uint64_t seed,
                                 int log2_points, int shifts, double* value,
                                 double* std_error);
int pam_chaos_moment_bound(const pam_model* model, int order, double t, double* out);
int pam_solution_second_moment_bound(const pam_model* model, double t, double* out);
int pam_solution_p_moment_bound(const pam_model* model, double t, double p, double* out);
int pam_chaos1_increment_bound_overlap(const pam_model* model, double t, double h, double eta,
                                       double* out);
int pam_chaos1_increment_bound_fresh(const pam_model* model, double t, double h, double* out);
int pam_holder_constants(const pam_model* model, double horizon, double p, double eta,
                         double out_constants[3]);

/* ---- noise synthesis and sampling ------------------------------------- */

int pam_noise_basis_build(const pam_model* model, double horizon, double domain_length,
                          int temporal_rank, int mode_count, int time_cells,
                          pam_noise_basis** out);
void pam_noise_basis_free(pam_noise_basis* basis);
int pam_noise_basis_info(const pam_noise_basis* basis, int* temporal_rank, int* mode_count,
                         int* time_cells, double* cov_trace, double* eigen_sum,
                         double* min_eigenvalue, int* clipped_count);
int pam_noise_basis_eigenvalue(const pam_noise_basis* basis, int index, double* out);
int pam_basis_var_j1(const pam_noise_basis* basis, double t, double* out);
int pam_lattice_var_j1(const pam_model* model, double horizon, double domain_length,
                       int time_cells, double t, double* out);

typedef struct pam_sim_options {
    uint64_t master_seed;
    int replicates;
    int chaos_order; /* 1 or 2 */
    int workers;
    double memory_budget_mb;
} pam_sim_options;

typedef struct pam_point_stats {
    double t, x;
    double mean_u, mean_u_se;
    double var_j1, var_j1_se;
    double var_j2, var_j2_se;
    double cov_j1_j2, cov_j1_j2_se;
    double moment2, moment2_se;
    double moment4, moment4_se;
    double exact_var_j1;
    double exact_var_j2;
} pam_point_stats;

/* points: length 2*n_points, (t, x) pairs.  stats: length n_points.
 * samples (nullable): length n_points*replicates, point-major u values. */
int pam_simulate(const pam_noise_basis* basis, const pam_sim_options* opts,
                 const double* points, int n_points, pam_point_stats* stats, double* samples);

int pam_mc_moment(const double* samples, size_t count, double p, double* estimate,
                  double* std_error);

/* ---- regularity ------------------------------------------------------- */

typedef struct pam_shift_maximality_report {
    double t;
    double reference;
    double max_value;
    double max_shift;
    int pass;
} pam_shift_maximality_report;

int pam_verify_shift_maximality(const pam_model* model, double t, const double* shifts,
                                int n_shifts, double* values /* length n_shifts, nullable */,
                                pam_shift_maximality_report* report);

typedef struct pam_increment_bound_report {
    double t;
    double lag;
    double eta;
    double theta;
    double lhs;
    double rhs;
    double slack_ratio;
    int pass;
} pam_increment_bound_report;

int pam_verify_time_increment_bound(const pam_model* model, double t, double h, double eta,
                                    const double* shifts, int n_shifts,
                                    pam_increment_bound_report* report);
int pam_verify_space_increment_bound(const pam_model* model, double t, const double* z,
                                     int z_len, double eta, const double* shifts, int n_shifts,
                                     pam_increment_bound_report* report);

typedef struct pam_inequality_entry {
    char name[48];
    uint64_t violations;
    double worst_slack;
    int asserted;
} pam_inequality_entry;

/* entries must have room for 5 records; *n_entries is set to the count. */
int pam_fuzz_scalar_inequalities(uint64_t samples, uint64_t seed,
                                 pam_inequality_entry* entries, int* n_entries, int* pass);

typedef struct pam_regularity_fit {
    int direction; /* 0 = time, 1 = space */
    double base_time;
    double theory_exponent;
    double slope;
    double intercept;
    double rms_residual;
    int pass_lower;
    int proximity_ok;
} pam_regularity_fit;

int pam_fit_increment_exponent(const pam_model* model, int direction, double base_time,
                               const double* lags, int n_lags, double margin,
                               double proximity_tol,
                               double* moments /* length n_lags, nullable */,
                               pam_regularity_fit* fit);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PAM_PAM_H */
