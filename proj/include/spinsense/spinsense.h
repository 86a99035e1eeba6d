/* spinsense: spin-chain magnetic-field sensing by sequential projective
 * measurement, with grid-based Bayesian estimation and precision-scaling
 * fits.  C API over the C++ core; every object is an opaque handle and
 * every function returns a status code.  On error, spinsense_last_error()
 * holds a thread-local message.
 *
 * Conventions: sites are 1-based with the measured site N last; times are
 * in units of 1/J; measurement outcomes are 0 = down, 1 = up.
 */
#ifndef SPINSENSE_H
#define SPINSENSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spinsense_status {
    SPINSENSE_OK = 0,
    SPINSENSE_ERR_INVALID_ARGUMENT = 1,
    SPINSENSE_ERR_NUMERICAL = 2,
    SPINSENSE_ERR_DEGENERATE_POSTERIOR = 3,
    SPINSENSE_ERR_IO = 4
} spinsense_status;

/* Message for the most recent failure on this thread; empty string if none. */
const char* spinsense_last_error(void);

const char* spinsense_version(void);

/* ---- chain model: fixed (sites, coupling), cached spectral data ---- */

typedef struct spinsense_model spinsense_model;

spinsense_status spinsense_model_new(int sites, double coupling, spinsense_model** out);
void spinsense_model_free(spinsense_model* model);
int spinsense_model_sites(const spinsense_model* model);
double spinsense_model_coupling(const spinsense_model* model);

/* ---- trajectory: one evolving pure state under H(field) ---- */

typedef struct spinsense_trajectory spinsense_trajectory;

spinsense_status spinsense_trajectory_new(spinsense_model* model, double field,
                                          spinsense_trajectory** out);
void spinsense_trajectory_free(spinsense_trajectory* traj);
/* Back to the ferromagnetic (all-down) state at t = 0. */
spinsense_status spinsense_trajectory_reset(spinsense_trajectory* traj);
/* Reseed the trajectory's private random stream. */
spinsense_status spinsense_trajectory_seed(spinsense_trajectory* traj, uint64_t seed);
spinsense_status spinsense_trajectory_evolve(spinsense_trajectory* traj, double dt);
spinsense_status spinsense_trajectory_time(const spinsense_trajectory* traj, double* out);
spinsense_status spinsense_trajectory_magnetization(const spinsense_trajectory* traj, int site,
                                                    double* out);
/* Probability of `outcome` (0/1) for a projective measurement on site N. */
spinsense_status spinsense_trajectory_outcome_probability(const spinsense_trajectory* traj,
                                                          int outcome, double* out);
/* Sample a measurement on site N from the private stream and collapse. */
spinsense_status spinsense_trajectory_measure(spinsense_trajectory* traj, int* outcome);
/* Collapse onto a chosen outcome (errors on a dead branch). */
spinsense_status spinsense_trajectory_apply_outcome(spinsense_trajectory* traj, int outcome);
/* |<psi(0)|psi(t)>| against the ferromagnetic initial state. */
spinsense_status spinsense_trajectory_initial_fidelity(const spinsense_trajectory* traj,
                                                       double* out);

/* ---- sequential measurement protocol ---- */

/* Exact probability of the outcome string under H(field); taus are the
 * evolution intervals between measurements. */
spinsense_status spinsense_sequence_probability(spinsense_model* model, double field,
                                                const double* taus, size_t n_seq,
                                                const int* outcomes, double* out);

typedef struct spinsense_dataset spinsense_dataset;

/* m_samples independent sequential records, Monte-Carlo sampled from a
 * seeded deterministic stream. */
spinsense_status spinsense_dataset_generate(spinsense_model* model, double field,
                                            const double* taus, size_t n_seq,
                                            uint64_t m_samples, uint64_t seed,
                                            spinsense_dataset** out);
void spinsense_dataset_free(spinsense_dataset* dataset);
uint64_t spinsense_dataset_samples(const spinsense_dataset* dataset);
int spinsense_dataset_n_seq(const spinsense_dataset* dataset);
int spinsense_dataset_sites(const spinsense_dataset* dataset);
double spinsense_dataset_coupling(const spinsense_dataset* dataset);
spinsense_status spinsense_dataset_taus(const spinsense_dataset* dataset, double* taus_out);
/* Number of distinct outcome sequences present. */
size_t spinsense_dataset_record_count(const spinsense_dataset* dataset);
/* Record i (sorted order): outcomes_out needs n_seq ints. */
spinsense_status spinsense_dataset_record(const spinsense_dataset* dataset, size_t index,
                                          int* outcomes_out, uint64_t* count_out);
/* Dataset over the first k measurements only. */
spinsense_status spinsense_dataset_prefix(const spinsense_dataset* dataset, int k,
                                          spinsense_dataset** out);
/* Line-oriented text format; load/save round-trips bit exactly. */
spinsense_status spinsense_dataset_save(const spinsense_dataset* dataset, const char* path);
spinsense_status spinsense_dataset_load(const char* path, spinsense_dataset** out);

/* ---- grid-based Bayesian inference ---- */

typedef struct spinsense_posterior spinsense_posterior;

/* Posterior density of the field over a uniform grid [grid_lo, grid_hi]
 * with grid_points points (>= 3), from a uniform prior. */
spinsense_status spinsense_posterior_compute(spinsense_model* model,
                                             const spinsense_dataset* dataset, double grid_lo,
                                             double grid_hi, int grid_points, int workers,
                                             spinsense_posterior** out);
/* Uniform density over the interval (reference/testing aid). */
spinsense_status spinsense_posterior_uniform(double grid_lo, double grid_hi, int grid_points,
                                             spinsense_posterior** out);
void spinsense_posterior_free(spinsense_posterior* posterior);
int spinsense_posterior_points(const spinsense_posterior* posterior);
/* Copies the grid and density; each buffer needs `points` doubles. */
spinsense_status spinsense_posterior_copy(const spinsense_posterior* posterior, double* grid_out,
                                          double* density_out);
spinsense_status spinsense_posterior_mean(const spinsense_posterior* posterior, double* out);
spinsense_status spinsense_posterior_variance(const spinsense_posterior* posterior, double* out);
/* Posterior mean, variance, and (sigma^2 + (<B>-B_true)^2)/B_true^2. */
spinsense_status spinsense_posterior_error_summary(const spinsense_posterior* posterior,
                                                   double b_true, double* mean_out,
                                                   double* variance_out, double* delta_b2_out);

/* Mean relative error over independent protocol repeats; repeat r draws
 * from the stream (seed, stream_tag, r).  average_squared selects averaging
 * delta_b^2 instead of delta_b. */
spinsense_status spinsense_average_error(spinsense_model* model, double field_true,
                                         const double* taus, size_t n_seq, uint64_t m_samples,
                                         int repeats, double grid_lo, double grid_hi,
                                         int grid_points, int average_squared, uint64_t seed,
                                         uint64_t stream_tag, double* delta_b_bar_out,
                                         double* std_error_out);

/* ---- time budget and scaling fits ---- */

/* T = m_samples (init_ratio + n_seq (1 + meas_ratio)) t_evo. */
spinsense_status spinsense_total_time(double t_evo, double init_ratio, double meas_ratio,
                                      int n_seq, uint64_t m_samples, double* out);
/* Standard-strategy samples with the same total time as the sequential run. */
spinsense_status spinsense_matched_samples(double init_ratio, double meas_ratio, int n_seq,
                                           uint64_t m_seq, uint64_t* out);
/* Least squares on (log x, log y) restricted to window_lo <= x <= window_hi
 * (pass 0 and INFINITY, or window_hi <= 0, for no restriction). */
spinsense_status spinsense_fit_loglog(const double* x, const double* y, size_t n,
                                      double window_lo, double window_hi, double* slope_out,
                                      double* intercept_out, double* residual_out);
/* Full scaling pipeline over one n_seq's error table (arrays of length
 * n_cells): per total-time fit of error vs field, then the intercept decay
 * C(T) = A T^-alpha. */
spinsense_status spinsense_extract_scaling(const double* fields, const double* total_times,
                                           const double* errors, size_t n_cells, double b_lo,
                                           double b_hi, double t_lo, double t_hi,
                                           double* delta_mean_out, double* delta_spread_out,
                                           double* amplitude_out, double* alpha_out,
                                           double* residual_out);

/* ---- error-table sweeps ---- */

typedef struct spinsense_sweep_params {
    const int* n_seq_list;
    size_t n_seq_count;
    const double* field_list;
    size_t field_count;
    const uint64_t* sample_list;
    size_t sample_count;
    /* Arithmetic schedule rule tau_i = tau_first + (i-1) tau_step, or an
     * explicit tau list (then n_seq_count must be 1 and match tau_count). */
    double tau_first;
    double tau_step;
    const double* taus;
    size_t tau_count;
    double grid_lo;
    double grid_hi;
    int grid_points;
    int repeats;
    int average_squared;
    double init_ratio;
    double meas_ratio;
    uint64_t seed;
    int workers;
} spinsense_sweep_params;

typedef struct spinsense_error_table spinsense_error_table;
typedef void (*spinsense_progress_fn)(size_t done, size_t total, void* user);

/* Runs every (n_seq, field, samples) cell; bit-reproducible for any worker
 * count.  The progress callback, when given, may fire from worker threads. */
spinsense_status spinsense_error_sweep(spinsense_model* model,
                                       const spinsense_sweep_params* params,
                                       spinsense_progress_fn progress, void* user,
                                       spinsense_error_table** out);
void spinsense_error_table_free(spinsense_error_table* table);
size_t spinsense_error_table_rows(const spinsense_error_table* table);
spinsense_status spinsense_error_table_row(const spinsense_error_table* table, size_t index,
                                           int* n_seq_out, double* field_out,
                                           uint64_t* m_samples_out, double* total_time_out,
                                           double* delta_b_bar_out, double* std_error_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPINSENSE_H */
