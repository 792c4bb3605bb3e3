#include "qmemdim.h"

#include <cstring>
#include <memory>
#include <string>

#include "qmemdim/dimensioning.hpp"
#include "qmemdim/distillation.hpp"
#include "qmemdim/errors.hpp"
#include "qmemdim/markov.hpp"
#include "qmemdim/monte_carlo.hpp"
#include "qmemdim/state_space.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) {
    g_last_error = what != nullptr ? what : "";
}

template <typename F>
qmd_status guarded(F&& body) noexcept {
    try {
        body();
        return QMD_OK;
    } catch (const qmemdim::ConvergenceError& e) {
        set_error(e.what());
        return QMD_ERR_CONVERGENCE;
    } catch (const qmemdim::CapacityError& e) {
        set_error(e.what());
        return QMD_ERR_CAPACITY;
    } catch (const qmemdim::ValidationError& e) {
        set_error(e.what());
        return QMD_ERR_VALIDATION;
    } catch (const std::exception& e) {
        set_error(e.what());
        return QMD_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return QMD_ERR_INTERNAL;
    }
}

qmemdim::OutageMeasurePoint to_measure_point(int value) {
    if (value == QMD_MEASURE_PRE_CONSUMPTION) {
        return qmemdim::OutageMeasurePoint::kPreConsumption;
    }
    if (value != QMD_MEASURE_CYCLE_START) {
        throw qmemdim::ValidationError("unknown measurement point");
    }
    return qmemdim::OutageMeasurePoint::kCycleStart;
}

qmemdim::SolverKind to_solver(int value) {
    if (value == QMD_SOLVER_DENSE) {
        return qmemdim::SolverKind::kDense;
    }
    if (value != QMD_SOLVER_POWER) {
        throw qmemdim::ValidationError("unknown solver kind");
    }
    return qmemdim::SolverKind::kPowerIteration;
}

void copy_buffer(const std::vector<double>& src, double* out, size_t length,
                 const char* what) {
    if (out == nullptr) {
        throw qmemdim::ValidationError("output buffer is null");
    }
    if (length != src.size()) {
        throw qmemdim::ValidationError(std::string("buffer length mismatch for ") + what);
    }
    std::memcpy(out, src.data(), src.size() * sizeof(double));
}

} // namespace

struct qmd_ladder {
    qmemdim::DistillationLadder ladder;
};

struct qmd_analysis {
    qmemdim::StateSpace space;
    qmemdim::ChainAnalysis result;
};

struct qmd_sim {
    qmemdim::StateSpace space;
    qmemdim::SimResult result;
    std::vector<double> marginal;
};

struct qmd_sweep {
    qmemdim::SweepResult result;
};

extern "C" {

const char* qmd_version(void) {
    return "0.1.0";
}

const char* qmd_last_error(void) {
    return g_last_error.c_str();
}

qmd_status qmd_ladder_create_werner(double f0, int steps, qmd_ladder** out) {
    return guarded([&] {
        if (out == nullptr) {
            throw qmemdim::ValidationError("output handle is null");
        }
        auto handle = std::make_unique<qmd_ladder>(
            qmd_ladder{qmemdim::DistillationLadder(qmemdim::werner_state(f0), steps)});
        *out = handle.release();
    });
}

qmd_status qmd_ladder_create(double a, double b, double c, double d, int steps,
                             qmd_ladder** out) {
    return guarded([&] {
        if (out == nullptr) {
            throw qmemdim::ValidationError("output handle is null");
        }
        const qmemdim::BellDiagonalState initial{a, b, c, d};
        auto handle = std::make_unique<qmd_ladder>(
            qmd_ladder{qmemdim::DistillationLadder(initial, steps)});
        *out = handle.release();
    });
}

void qmd_ladder_free(qmd_ladder* ladder) {
    delete ladder;
}

int qmd_ladder_steps(const qmd_ladder* ladder) {
    return ladder != nullptr ? ladder->ladder.max_steps() : -1;
}

qmd_status qmd_ladder_level(const qmd_ladder* ladder, int level, double coeffs[4]) {
    return guarded([&] {
        if (ladder == nullptr || coeffs == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        if (level < 0 || level > ladder->ladder.max_steps()) {
            throw qmemdim::ValidationError("ladder level out of range");
        }
        const qmemdim::BellDiagonalState& s = ladder->ladder.level(level);
        coeffs[0] = s.a;
        coeffs[1] = s.b;
        coeffs[2] = s.c;
        coeffs[3] = s.d;
    });
}

qmd_status qmd_ladder_success_prob(const qmd_ladder* ladder, int level, double* out) {
    return guarded([&] {
        if (ladder == nullptr || out == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        if (level < 0 || level >= ladder->ladder.max_steps()) {
            throw qmemdim::ValidationError("ladder step out of range");
        }
        *out = ladder->ladder.success_prob(level);
    });
}

int qmd_ladder_has_certain_step(const qmd_ladder* ladder) {
    return ladder != nullptr && ladder->ladder.has_certain_step() ? 1 : 0;
}

void qmd_analysis_params_init(qmd_analysis_params* params, int memory_size) {
    if (params == nullptr) {
        return;
    }
    params->memory_size = memory_size;
    params->consumption = 1;
    params->bootstrap_wait = 0;
    params->tol = 1e-12;
    params->max_iterations = 1000000;
    params->measure_point = QMD_MEASURE_CYCLE_START;
    params->solver = QMD_SOLVER_POWER;
}

qmd_status qmd_analysis_run(const qmd_ladder* ladder, const qmd_analysis_params* params,
                            qmd_analysis** out) {
    return guarded([&] {
        if (ladder == nullptr || params == nullptr || out == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        qmemdim::AnalysisOptions options;
        options.solver.tol = params->tol;
        options.solver.max_iterations = params->max_iterations;
        options.measure_point = to_measure_point(params->measure_point);
        options.solver_kind = to_solver(params->solver);

        qmemdim::StateSpace space(
            qmemdim::MemoryConfig{params->memory_size, ladder->ladder.max_steps()});
        qmemdim::RoundPolicy policy{params->consumption, params->bootstrap_wait};
        qmemdim::ChainAnalysis result =
            qmemdim::analyze_chain(space, ladder->ladder, policy, options);
        auto handle = std::make_unique<qmd_analysis>(
            qmd_analysis{std::move(space), std::move(result)});
        *out = handle.release();
    });
}

void qmd_analysis_free(qmd_analysis* analysis) {
    delete analysis;
}

size_t qmd_analysis_state_count(const qmd_analysis* analysis) {
    return analysis != nullptr ? analysis->space.size() : 0;
}

int qmd_analysis_levels(const qmd_analysis* analysis) {
    return analysis != nullptr ? analysis->space.parts() : 0;
}

qmd_status qmd_analysis_state(const qmd_analysis* analysis, size_t index, int* counts) {
    return guarded([&] {
        if (analysis == nullptr || counts == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        const auto state = analysis->space.state(index);
        std::memcpy(counts, state.data(), state.size() * sizeof(int));
    });
}

qmd_status qmd_analysis_probability(const qmd_analysis* analysis, size_t index,
                                    double* out) {
    return guarded([&] {
        if (analysis == nullptr || out == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        if (index >= analysis->result.stationary_dist.probs.size()) {
            throw qmemdim::ValidationError("state index out of range");
        }
        *out = analysis->result.stationary_dist.probs[index];
    });
}

qmd_status qmd_analysis_probabilities(const qmd_analysis* analysis, double* out,
                                      size_t length) {
    return guarded([&] {
        if (analysis == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        copy_buffer(analysis->result.stationary_dist.probs, out, length,
                    "stationary probabilities");
    });
}

qmd_status qmd_analysis_measured(const qmd_analysis* analysis, double* out,
                                 size_t length) {
    return guarded([&] {
        if (analysis == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        copy_buffer(analysis->result.measured.probs, out, length,
                    "measured distribution");
    });
}

double qmd_analysis_outage(const qmd_analysis* analysis) {
    return analysis != nullptr ? analysis->result.report.outage_probability : -1.0;
}

qmd_status qmd_analysis_marginal(const qmd_analysis* analysis, double* out,
                                 size_t length) {
    return guarded([&] {
        if (analysis == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        copy_buffer(analysis->result.report.marginal_nd, out, length, "marginal");
    });
}

long qmd_analysis_iterations(const qmd_analysis* analysis) {
    return analysis != nullptr ? analysis->result.report.iterations : -1;
}

double qmd_analysis_residual(const qmd_analysis* analysis) {
    return analysis != nullptr ? analysis->result.report.residual : -1.0;
}

double qmd_analysis_diagnostic_shortfall(const qmd_analysis* analysis) {
    return analysis != nullptr ? analysis->result.diagnostic_shortfall : -1.0;
}

int qmd_analysis_ergodicity_warning(const qmd_analysis* analysis) {
    return analysis != nullptr && analysis->result.report.ergodicity_warning ? 1 : 0;
}

int qmd_analysis_trivial_warning(const qmd_analysis* analysis) {
    return analysis != nullptr && analysis->result.report.trivial_warning ? 1 : 0;
}

void qmd_sim_params_init(qmd_sim_params* params, int memory_size) {
    if (params == nullptr) {
        return;
    }
    params->memory_size = memory_size;
    params->consumption = 1;
    params->bootstrap_wait = 0;
    params->rounds = 1000000;
    params->burn_in = 1000;
    params->seed = 1;
    params->measure_point = QMD_MEASURE_CYCLE_START;
}

qmd_status qmd_sim_run(const qmd_ladder* ladder, const qmd_sim_params* params,
                       qmd_sim** out) {
    return guarded([&] {
        if (ladder == nullptr || params == nullptr || out == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        qmemdim::SimConfig config;
        config.memory = qmemdim::MemoryConfig{params->memory_size,
                                              ladder->ladder.max_steps()};
        config.policy = qmemdim::RoundPolicy{params->consumption, params->bootstrap_wait};
        config.rounds = params->rounds;
        config.burn_in = params->burn_in;
        config.seed = params->seed;
        config.measure_point = to_measure_point(params->measure_point);

        qmemdim::StateSpace space(config.memory);
        qmemdim::SimResult result = qmemdim::simulate(space, ladder->ladder, config);
        std::vector<double> marginal = qmemdim::empirical_nd_marginal(result, space);
        auto handle = std::make_unique<qmd_sim>(
            qmd_sim{std::move(space), std::move(result), std::move(marginal)});
        *out = handle.release();
    });
}

void qmd_sim_free(qmd_sim* sim) {
    delete sim;
}

size_t qmd_sim_state_count(const qmd_sim* sim) {
    return sim != nullptr ? sim->space.size() : 0;
}

qmd_status qmd_sim_state(const qmd_sim* sim, size_t index, int* counts) {
    return guarded([&] {
        if (sim == nullptr || counts == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        const auto state = sim->space.state(index);
        std::memcpy(counts, state.data(), state.size() * sizeof(int));
    });
}

qmd_status qmd_sim_occupancy(const qmd_sim* sim, double* out, size_t length) {
    return guarded([&] {
        if (sim == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        copy_buffer(sim->result.empirical_occupancy, out, length, "occupancy");
    });
}

qmd_status qmd_sim_marginal(const qmd_sim* sim, double* out, size_t length) {
    return guarded([&] {
        if (sim == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        copy_buffer(sim->marginal, out, length, "marginal");
    });
}

double qmd_sim_outage(const qmd_sim* sim) {
    return sim != nullptr ? sim->result.empirical_outage : -1.0;
}

long qmd_sim_outage_events(const qmd_sim* sim) {
    return sim != nullptr ? sim->result.outage_events : -1;
}

long qmd_sim_rounds_counted(const qmd_sim* sim) {
    return sim != nullptr ? sim->result.rounds_counted : -1;
}

long qmd_sim_consumption_rounds(const qmd_sim* sim) {
    return sim != nullptr ? sim->result.consumption_rounds_counted : -1;
}

void qmd_sweep_params_init(qmd_sweep_params* params) {
    if (params == nullptr) {
        return;
    }
    params->f0_values = nullptr;
    params->f0_count = 0;
    params->wait_values = nullptr;
    params->wait_count = 0;
    params->consumption = 1;
    params->max_steps = 0;
    params->m_min = 1;
    params->m_max = 1;
    params->target_outage = 1e-3;
    params->tol = 1e-12;
    params->max_iterations = 1000000;
    params->measure_point = QMD_MEASURE_CYCLE_START;
    params->threads = 0;
}

qmd_status qmd_sweep_run(const qmd_sweep_params* params, qmd_sweep** out) {
    return guarded([&] {
        if (params == nullptr || out == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        if (params->f0_values == nullptr || params->wait_values == nullptr) {
            throw qmemdim::ValidationError("sweep value arrays are null");
        }
        qmemdim::SweepSpec spec;
        spec.f0_values.assign(params->f0_values, params->f0_values + params->f0_count);
        spec.wait_values.assign(params->wait_values,
                                params->wait_values + params->wait_count);
        spec.consumption = params->consumption;
        spec.max_steps = params->max_steps;
        spec.m_min = params->m_min;
        spec.m_max = params->m_max;
        spec.target_outage = params->target_outage;
        spec.analysis.solver.tol = params->tol;
        spec.analysis.solver.max_iterations = params->max_iterations;
        spec.analysis.measure_point = to_measure_point(params->measure_point);

        auto handle = std::make_unique<qmd_sweep>(
            qmd_sweep{qmemdim::sweep(spec, params->threads)});
        *out = handle.release();
    });
}

void qmd_sweep_free(qmd_sweep* sweep) {
    delete sweep;
}

size_t qmd_sweep_row_count(const qmd_sweep* sweep) {
    return sweep != nullptr ? sweep->result.rows.size() : 0;
}

qmd_status qmd_sweep_get_row(const qmd_sweep* sweep, size_t index, qmd_sweep_row* out) {
    return guarded([&] {
        if (sweep == nullptr || out == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        if (index >= sweep->result.rows.size()) {
            throw qmemdim::ValidationError("sweep row index out of range");
        }
        const qmemdim::SweepRow& row = sweep->result.rows[index];
        out->f0 = row.f0;
        out->wait = row.wait;
        out->memory_size = row.memory_size;
        out->outage = row.outage;
        out->iterations = row.iterations;
        out->wall_time_s = row.wall_time_s;
        out->converged = row.converged ? 1 : 0;
    });
}

size_t qmd_sweep_min_memory_count(const qmd_sweep* sweep) {
    return sweep != nullptr ? sweep->result.min_memory.size() : 0;
}

qmd_status qmd_sweep_get_min_memory(const qmd_sweep* sweep, size_t index, double* f0,
                                    int* wait, int* memory_size) {
    return guarded([&] {
        if (sweep == nullptr || f0 == nullptr || wait == nullptr ||
            memory_size == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        if (index >= sweep->result.min_memory.size()) {
            throw qmemdim::ValidationError("min-memory index out of range");
        }
        const qmemdim::MinMemoryEntry& entry = sweep->result.min_memory[index];
        *f0 = entry.f0;
        *wait = entry.wait;
        *memory_size = entry.memory_size.value_or(-1);
    });
}

size_t qmd_sweep_warning_count(const qmd_sweep* sweep) {
    return sweep != nullptr ? sweep->result.warnings.size() : 0;
}

const char* qmd_sweep_warning(const qmd_sweep* sweep, size_t index) {
    if (sweep == nullptr || index >= sweep->result.warnings.size()) {
        return nullptr;
    }
    return sweep->result.warnings[index].c_str();
}

qmd_status qmd_min_memory(const qmd_ladder* ladder, int consumption, int wait,
                          double target_outage, int m_lo, int m_hi, double tol,
                          long max_iterations, int measure_point, int* memory_size) {
    return guarded([&] {
        if (ladder == nullptr || memory_size == nullptr) {
            throw qmemdim::ValidationError("null argument");
        }
        qmemdim::AnalysisOptions options;
        options.solver.tol = tol;
        options.solver.max_iterations = max_iterations;
        options.measure_point = to_measure_point(measure_point);
        const auto found = qmemdim::min_memory(
            ladder->ladder.level(0), consumption, ladder->ladder.max_steps(), wait,
            target_outage, m_lo, m_hi, options);
        *memory_size = found.value_or(-1);
    });
}

} // extern "C"
