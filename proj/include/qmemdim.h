/*
 * qmemdim — quantum memory dimensioning for distilled EPR pairs.
 *
 * C API of the shared library. All heavy objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * qmd_status and reports details through qmd_last_error(). Numeric results
 * are read back through plain getters so the header stays plain C.
 */

#ifndef QMEMDIM_H
#define QMEMDIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QMD_API __declspec(dllexport)
#else
#define QMD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; nonzero values match the CLI exit codes. */
typedef enum qmd_status {
    QMD_OK = 0,
    QMD_ERR_INTERNAL = 1,    /* unexpected failure */
    QMD_ERR_VALIDATION = 2,  /* invalid argument or violated precondition */
    QMD_ERR_CONVERGENCE = 3, /* iterative solver exhausted its budget */
    QMD_ERR_CAPACITY = 4     /* problem exceeds a configured size budget */
} qmd_status;

/* Outage measurement point within a bootstrap cycle. */
enum {
    QMD_MEASURE_CYCLE_START = 0,    /* stationary state of P0^W * Pc (default) */
    QMD_MEASURE_PRE_CONSUMPTION = 1 /* stationary state advanced by P0^W */
};

/* Stationary solver selection. */
enum {
    QMD_SOLVER_POWER = 0, /* sparse power iteration (default) */
    QMD_SOLVER_DENSE = 1  /* dense direct solve, small spaces only */
};

QMD_API const char* qmd_version(void);

/* Thread-local message describing the most recent failure on this thread. */
QMD_API const char* qmd_last_error(void);

/* ------------------------------------------------------------------ */
/* Distillation ladder                                                 */
/* ------------------------------------------------------------------ */

typedef struct qmd_ladder qmd_ladder;

/* Ladder from a Werner state of fidelity f0 with `steps` distillation steps. */
QMD_API qmd_status qmd_ladder_create_werner(double f0, int steps, qmd_ladder** out);

/* Ladder from an explicit Bell-diagonal state (a, b, c, d). */
QMD_API qmd_status qmd_ladder_create(double a, double b, double c, double d, int steps,
                                     qmd_ladder** out);

QMD_API void qmd_ladder_free(qmd_ladder* ladder);

QMD_API int qmd_ladder_steps(const qmd_ladder* ladder);

/* Coefficients (a, b, c, d) of level `level`, 0 <= level <= steps. */
QMD_API qmd_status qmd_ladder_level(const qmd_ladder* ladder, int level,
                                    double coeffs[4]);

/* Success probability p_{level -> level+1}, 0 <= level < steps. */
QMD_API qmd_status qmd_ladder_success_prob(const qmd_ladder* ladder, int level,
                                           double* out);

/* 1 if any step succeeds with probability exactly 1 (ergodicity warning). */
QMD_API int qmd_ladder_has_certain_step(const qmd_ladder* ladder);

/* ------------------------------------------------------------------ */
/* Stationary analysis (transition matrix + outage)                    */
/* ------------------------------------------------------------------ */

typedef struct qmd_analysis_params {
    int memory_size;    /* M >= 1 */
    int consumption;    /* c >= 0 */
    int bootstrap_wait; /* W >= 0 */
    double tol;         /* L1 tolerance of the power iteration */
    long max_iterations;
    int measure_point; /* QMD_MEASURE_* */
    int solver;        /* QMD_SOLVER_* */
} qmd_analysis_params;

/* Fills defaults: c=1, W=0, tol=1e-12, 1e6 iterations, cycle-start, power. */
QMD_API void qmd_analysis_params_init(qmd_analysis_params* params, int memory_size);

typedef struct qmd_analysis qmd_analysis;

/* Builds the state space and transition matrices for `ladder` under
 * `params`, solves for the stationary distribution of the (possibly
 * bootstrapped) round chain and evaluates the outage probability. */
QMD_API qmd_status qmd_analysis_run(const qmd_ladder* ladder,
                                    const qmd_analysis_params* params,
                                    qmd_analysis** out);

QMD_API void qmd_analysis_free(qmd_analysis* analysis);

QMD_API size_t qmd_analysis_state_count(const qmd_analysis* analysis);
QMD_API int qmd_analysis_levels(const qmd_analysis* analysis); /* d + 1 */

/* Occupancy vector of the state with the given rank; `counts` needs d+1 ints. */
QMD_API qmd_status qmd_analysis_state(const qmd_analysis* analysis, size_t index,
                                      int* counts);

/* Stationary probability of one state / the whole vector. */
QMD_API qmd_status qmd_analysis_probability(const qmd_analysis* analysis, size_t index,
                                            double* out);
QMD_API qmd_status qmd_analysis_probabilities(const qmd_analysis* analysis, double* out,
                                              size_t length);

/* Distribution the outage was evaluated on (differs from the stationary
 * vector only for W > 0 with the pre-consumption measurement point). */
QMD_API qmd_status qmd_analysis_measured(const qmd_analysis* analysis, double* out,
                                         size_t length);

QMD_API double qmd_analysis_outage(const qmd_analysis* analysis);

/* Marginal pmf of n_d; `out` needs M+1 doubles. */
QMD_API qmd_status qmd_analysis_marginal(const qmd_analysis* analysis, double* out,
                                         size_t length);

QMD_API long qmd_analysis_iterations(const qmd_analysis* analysis);
QMD_API double qmd_analysis_residual(const qmd_analysis* analysis);

/* Diagnostic P(n_d + new_d < c) after one more distillation phase. */
QMD_API double qmd_analysis_diagnostic_shortfall(const qmd_analysis* analysis);

QMD_API int qmd_analysis_ergodicity_warning(const qmd_analysis* analysis);
QMD_API int qmd_analysis_trivial_warning(const qmd_analysis* analysis);

/* ------------------------------------------------------------------ */
/* Monte Carlo simulation                                              */
/* ------------------------------------------------------------------ */

typedef struct qmd_sim_params {
    int memory_size;
    int consumption;
    int bootstrap_wait;
    long rounds;
    long burn_in;
    uint64_t seed;
    int measure_point; /* QMD_MEASURE_* */
} qmd_sim_params;

QMD_API void qmd_sim_params_init(qmd_sim_params* params, int memory_size);

typedef struct qmd_sim qmd_sim;

QMD_API qmd_status qmd_sim_run(const qmd_ladder* ladder, const qmd_sim_params* params,
                               qmd_sim** out);
QMD_API void qmd_sim_free(qmd_sim* sim);

QMD_API size_t qmd_sim_state_count(const qmd_sim* sim);
QMD_API qmd_status qmd_sim_state(const qmd_sim* sim, size_t index, int* counts);
QMD_API qmd_status qmd_sim_occupancy(const qmd_sim* sim, double* out, size_t length);
QMD_API qmd_status qmd_sim_marginal(const qmd_sim* sim, double* out, size_t length);
QMD_API double qmd_sim_outage(const qmd_sim* sim);
QMD_API long qmd_sim_outage_events(const qmd_sim* sim);
QMD_API long qmd_sim_rounds_counted(const qmd_sim* sim);
QMD_API long qmd_sim_consumption_rounds(const qmd_sim* sim);

/* ------------------------------------------------------------------ */
/* Dimensioning sweeps                                                 */
/* ------------------------------------------------------------------ */

typedef struct qmd_sweep_params {
    const double* f0_values;
    size_t f0_count;
    const int* wait_values;
    size_t wait_count;
    int consumption;
    int max_steps;
    int m_min;
    int m_max;
    double target_outage;
    double tol;
    long max_iterations;
    int measure_point;
    int threads; /* 0 = hardware concurrency */
} qmd_sweep_params;

QMD_API void qmd_sweep_params_init(qmd_sweep_params* params);

typedef struct qmd_sweep qmd_sweep;

QMD_API qmd_status qmd_sweep_run(const qmd_sweep_params* params, qmd_sweep** out);
QMD_API void qmd_sweep_free(qmd_sweep* sweep);

typedef struct qmd_sweep_row {
    double f0;
    int wait;
    int memory_size;
    double outage;
    long iterations;
    double wall_time_s;
    int converged;
} qmd_sweep_row;

QMD_API size_t qmd_sweep_row_count(const qmd_sweep* sweep);
QMD_API qmd_status qmd_sweep_get_row(const qmd_sweep* sweep, size_t index,
                                     qmd_sweep_row* out);

/* One (f0, w) minimum-memory entry; memory_size is -1 when absent. */
QMD_API size_t qmd_sweep_min_memory_count(const qmd_sweep* sweep);
QMD_API qmd_status qmd_sweep_get_min_memory(const qmd_sweep* sweep, size_t index,
                                            double* f0, int* wait, int* memory_size);

QMD_API size_t qmd_sweep_warning_count(const qmd_sweep* sweep);
QMD_API const char* qmd_sweep_warning(const qmd_sweep* sweep, size_t index);

/* Smallest M in [m_lo, m_hi] with outage <= target for the given ladder and
 * policy; *memory_size is set to -1 when no M in range qualifies. */
QMD_API qmd_status qmd_min_memory(const qmd_ladder* ladder, int consumption, int wait,
                                  double target_outage, int m_lo, int m_hi, double tol,
                                  long max_iterations, int measure_point,
                                  int* memory_size);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QMEMDIM_H */
