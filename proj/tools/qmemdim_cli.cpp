// qmemdim command-line front end.
//
// Subcommands: ladder, stationary, outage, sweep, simulate. Each accepts a
// JSON config file (--config) whose values are overridden by flags, and
// emits CSV or JSON to stdout or --out. All numerics run inside the shared
// library through its C API.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmemdim.h"

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------
// Run configuration shared by all subcommands (flags override file values).
// ---------------------------------------------------------------------

struct RunConfig {
    int m = 16;
    int d = 2;
    int c = 1;
    int w = 0;
    std::optional<double> f0;
    std::optional<std::array<double, 4>> state; // explicit (a, b, c, d)
    double tol = 1e-12;
    long max_iters = 1000000;
    std::string measure = "cycle-start"; // or "pre-consumption"
    std::string solver = "power";        // or "direct"
    long rounds = 1000000;
    long burn_in = 1000;
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out = "-";

    bool operator==(const RunConfig&) const = default;
};

json config_to_json(const RunConfig& cfg) {
    json j{{"m", cfg.m},
           {"d", cfg.d},
           {"c", cfg.c},
           {"w", cfg.w},
           {"tol", cfg.tol},
           {"max_iters", cfg.max_iters},
           {"measure", cfg.measure},
           {"solver", cfg.solver},
           {"rounds", cfg.rounds},
           {"burn_in", cfg.burn_in},
           {"seed", cfg.seed},
           {"format", cfg.format},
           {"out", cfg.out}};
    if (cfg.f0.has_value()) {
        j["f0"] = *cfg.f0;
    }
    if (cfg.state.has_value()) {
        j["state"] = {{"a", (*cfg.state)[0]},
                      {"b", (*cfg.state)[1]},
                      {"c", (*cfg.state)[2]},
                      {"d", (*cfg.state)[3]}};
    }
    return j;
}

void config_from_json(const json& j, RunConfig& cfg) {
    if (j.contains("m")) cfg.m = j.at("m").get<int>();
    if (j.contains("d")) cfg.d = j.at("d").get<int>();
    if (j.contains("c")) cfg.c = j.at("c").get<int>();
    if (j.contains("w")) cfg.w = j.at("w").get<int>();
    if (j.contains("f0")) cfg.f0 = j.at("f0").get<double>();
    if (j.contains("state")) {
        const json& s = j.at("state");
        cfg.state = std::array<double, 4>{s.at("a").get<double>(), s.at("b").get<double>(),
                                          s.at("c").get<double>(), s.at("d").get<double>()};
    }
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<long>();
    if (j.contains("measure")) cfg.measure = j.at("measure").get<std::string>();
    if (j.contains("solver")) cfg.solver = j.at("solver").get<std::string>();
    if (j.contains("rounds")) cfg.rounds = j.at("rounds").get<long>();
    if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
}

// Exit codes: 0 ok, 2 validation, 3 convergence, 4 capacity, 1 internal.
struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
    throw CliError{code, message};
}

[[noreturn]] void fail_status(qmd_status status) {
    throw CliError{static_cast<int>(status), qmd_last_error()};
}

void warn(const std::string& message) {
    std::cerr << "warning: " << message << "\n";
}

// 12 significant digits, enough for regression diffing of probabilities.
std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path == "-" || out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        fail(2, "cannot open output file: " + out_path);
    }
    file << text;
}

// ---------------------------------------------------------------------
// Shared option plumbing
// ---------------------------------------------------------------------

struct CommonFlags {
    std::string config_path;
    double f0 = 0.0;
    double coef_a = 0.0, coef_b = 0.0, coef_c = 0.0, coef_d = 0.0;
    int m = 0, d = 0, c = 0, w = 0;
    double tol = 0.0;
    long max_iters = 0;
    std::string measure, solver, format, out;
    long rounds = 0, burn_in = 0;
    std::uint64_t seed = 0;
};

void add_config_flag(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "JSON config file; flags override file values");
}

void add_state_flags(CLI::App* cmd, CommonFlags& flags, bool ladder_style) {
    cmd->add_option("--f0", flags.f0, "Werner-state fidelity of the raw pairs");
    cmd->add_option("--a", flags.coef_a, "Bell-diagonal coefficient a");
    cmd->add_option("--b", flags.coef_b, "Bell-diagonal coefficient b");
    if (ladder_style) {
        // `ladder` has no consumption parameter, so --c is the coefficient.
        cmd->add_option("--c", flags.coef_c, "Bell-diagonal coefficient c");
    } else {
        cmd->add_option("--c-coef", flags.coef_c, "Bell-diagonal coefficient c");
    }
    cmd->add_option("--d-coef", flags.coef_d, "Bell-diagonal coefficient d");
}

void add_output_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--format", flags.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", flags.out, "Output path ('-' for stdout)");
}

RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags,
                         bool ladder_style) {
    RunConfig cfg;
    if (!flags.config_path.empty()) {
        std::ifstream file(flags.config_path);
        if (!file) {
            fail(2, "cannot read config file: " + flags.config_path);
        }
        json j;
        try {
            file >> j;
        } catch (const std::exception& e) {
            fail(2, std::string("malformed config JSON: ") + e.what());
        }
        try {
            config_from_json(j, cfg);
        } catch (const std::exception& e) {
            fail(2, std::string("invalid config: ") + e.what());
        }
    }

    auto given = [&](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };

    if (given("--m")) cfg.m = flags.m;
    if (given("--d")) cfg.d = flags.d;
    if (!ladder_style && given("--c")) cfg.c = flags.c;
    if (given("--w")) cfg.w = flags.w;
    if (given("--tol")) cfg.tol = flags.tol;
    if (given("--max-iters")) cfg.max_iters = flags.max_iters;
    if (given("--measure")) cfg.measure = flags.measure;
    if (given("--solver")) cfg.solver = flags.solver;
    if (given("--rounds")) cfg.rounds = flags.rounds;
    if (given("--burn-in")) cfg.burn_in = flags.burn_in;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--format")) cfg.format = flags.format;
    if (given("--out")) cfg.out = flags.out;

    const std::string c_coef_flag = ladder_style ? "--c" : "--c-coef";
    const bool any_coef = given("--a") || given("--b") || given(c_coef_flag) ||
                          given("--d-coef");
    if (given("--f0") && any_coef) {
        fail(2, "provide either --f0 or explicit state coefficients, not both");
    }
    if (given("--f0")) {
        cfg.f0 = flags.f0;
        cfg.state.reset();
    } else if (any_coef) {
        if (!(given("--a") && given("--b") && given(c_coef_flag) && given("--d-coef"))) {
            fail(2, "explicit states need all four coefficients (--a --b " +
                        c_coef_flag + " --d-coef)");
        }
        cfg.state = std::array<double, 4>{flags.coef_a, flags.coef_b, flags.coef_c,
                                          flags.coef_d};
        cfg.f0.reset();
    }

    if (cfg.f0.has_value() == cfg.state.has_value()) {
        fail(2, "config needs exactly one of f0 or explicit state coefficients");
    }
    return cfg;
}

// RAII wrappers over the C handles.
using LadderPtr = std::unique_ptr<qmd_ladder, decltype(&qmd_ladder_free)>;
using AnalysisPtr = std::unique_ptr<qmd_analysis, decltype(&qmd_analysis_free)>;
using SimPtr = std::unique_ptr<qmd_sim, decltype(&qmd_sim_free)>;
using SweepPtr = std::unique_ptr<qmd_sweep, decltype(&qmd_sweep_free)>;

LadderPtr make_ladder(const RunConfig& cfg) {
    qmd_ladder* raw = nullptr;
    qmd_status status;
    if (cfg.f0.has_value()) {
        status = qmd_ladder_create_werner(*cfg.f0, cfg.d, &raw);
    } else {
        const auto& s = *cfg.state;
        status = qmd_ladder_create(s[0], s[1], s[2], s[3], cfg.d, &raw);
    }
    if (status != QMD_OK) {
        fail_status(status);
    }
    return LadderPtr(raw, &qmd_ladder_free);
}

int measure_code(const RunConfig& cfg) {
    if (cfg.measure == "cycle-start") {
        return QMD_MEASURE_CYCLE_START;
    }
    if (cfg.measure == "pre-consumption") {
        return QMD_MEASURE_PRE_CONSUMPTION;
    }
    fail(2, "measure must be 'cycle-start' or 'pre-consumption'");
}

int solver_code(const RunConfig& cfg) {
    if (cfg.solver == "power") {
        return QMD_SOLVER_POWER;
    }
    if (cfg.solver == "direct") {
        return QMD_SOLVER_DENSE;
    }
    fail(2, "solver must be 'power' or 'direct'");
}

AnalysisPtr run_analysis(const RunConfig& cfg, const LadderPtr& ladder) {
    qmd_analysis_params params;
    qmd_analysis_params_init(&params, cfg.m);
    params.consumption = cfg.c;
    params.bootstrap_wait = cfg.w;
    params.tol = cfg.tol;
    params.max_iterations = cfg.max_iters;
    params.measure_point = measure_code(cfg);
    params.solver = solver_code(cfg);
    qmd_analysis* raw = nullptr;
    const qmd_status status = qmd_analysis_run(ladder.get(), &params, &raw);
    if (status != QMD_OK) {
        fail_status(status);
    }
    return AnalysisPtr(raw, &qmd_analysis_free);
}

void warn_ladder(const LadderPtr& ladder) {
    if (qmd_ladder_has_certain_step(ladder.get()) != 0) {
        warn("some distillation steps succeed with probability 1; the chain's "
             "stationary distribution is not guaranteed unique");
    }
}

void warn_analysis(const AnalysisPtr& analysis, const RunConfig& cfg) {
    if (qmd_analysis_ergodicity_warning(analysis.get()) != 0) {
        warn("ergodicity not guaranteed for this configuration (c = 0 or a "
             "distillation step with success probability 1)");
    }
    if (qmd_analysis_trivial_warning(analysis.get()) != 0) {
        warn("consumption c = " + std::to_string(cfg.c) + " exceeds memory M = " +
             std::to_string(cfg.m) + "; outage is 1 by construction");
    }
}

std::vector<int> analysis_state(const AnalysisPtr& analysis, size_t index, int levels) {
    std::vector<int> counts(static_cast<size_t>(levels), 0);
    if (qmd_analysis_state(analysis.get(), index, counts.data()) != QMD_OK) {
        fail_status(QMD_ERR_INTERNAL);
    }
    return counts;
}

// ---------------------------------------------------------------------
// ladder
// ---------------------------------------------------------------------

void cmd_ladder(const RunConfig& cfg) {
    LadderPtr ladder = make_ladder(cfg);
    warn_ladder(ladder);
    const int steps = qmd_ladder_steps(ladder.get());

    if (cfg.format == "json") {
        json rows = json::array();
        for (int i = 0; i <= steps; ++i) {
            double coeffs[4];
            qmd_ladder_level(ladder.get(), i, coeffs);
            json row{{"level", i},
                     {"a", coeffs[0]},
                     {"b", coeffs[1]},
                     {"c", coeffs[2]},
                     {"d", coeffs[3]}};
            if (i < steps) {
                double p = 0.0;
                qmd_ladder_success_prob(ladder.get(), i, &p);
                row["success_prob"] = p;
            } else {
                row["success_prob"] = nullptr;
            }
            rows.push_back(row);
        }
        json doc{{"config", config_to_json(cfg)}, {"levels", rows}};
        write_output(doc.dump(2) + "\n", cfg.out);
        return;
    }

    std::ostringstream csv;
    csv << "level,a,b,c,d,success_prob\n";
    for (int i = 0; i <= steps; ++i) {
        double coeffs[4];
        qmd_ladder_level(ladder.get(), i, coeffs);
        csv << i << ',' << fmt(coeffs[0]) << ',' << fmt(coeffs[1]) << ','
            << fmt(coeffs[2]) << ',' << fmt(coeffs[3]) << ',';
        if (i < steps) {
            double p = 0.0;
            qmd_ladder_success_prob(ladder.get(), i, &p);
            csv << fmt(p);
        }
        csv << '\n';
    }
    write_output(csv.str(), cfg.out);
}

// ---------------------------------------------------------------------
// stationary
// ---------------------------------------------------------------------

void cmd_stationary(const RunConfig& cfg) {
    LadderPtr ladder = make_ladder(cfg);
    AnalysisPtr analysis = run_analysis(cfg, ladder);
    warn_analysis(analysis, cfg);

    const size_t count = qmd_analysis_state_count(analysis.get());
    const int levels = qmd_analysis_levels(analysis.get());
    std::vector<double> probs(count, 0.0);
    qmd_analysis_probabilities(analysis.get(), probs.data(), count);
    std::vector<double> marginal(static_cast<size_t>(cfg.m) + 1, 0.0);
    qmd_analysis_marginal(analysis.get(), marginal.data(), marginal.size());

    if (cfg.format == "json") {
        json states = json::array();
        for (size_t k = 0; k < count; ++k) {
            states.push_back(json{{"counts", analysis_state(analysis, k, levels)},
                                  {"probability", probs[k]}});
        }
        json doc{{"config", config_to_json(cfg)},
                 {"outage", qmd_analysis_outage(analysis.get())},
                 {"iterations", qmd_analysis_iterations(analysis.get())},
                 {"residual", qmd_analysis_residual(analysis.get())},
                 {"diagnostic_shortfall", qmd_analysis_diagnostic_shortfall(analysis.get())},
                 {"states", states},
                 {"marginal_nd", marginal}};
        write_output(doc.dump(2) + "\n", cfg.out);
        return;
    }

    std::ostringstream csv;
    for (int i = 0; i < levels; ++i) {
        csv << 'n' << i << ',';
    }
    csv << "probability\n";
    for (size_t k = 0; k < count; ++k) {
        const std::vector<int> counts = analysis_state(analysis, k, levels);
        for (int v : counts) {
            csv << v << ',';
        }
        csv << fmt(probs[k]) << '\n';
    }
    csv << "\nnd,probability\n";
    for (size_t nd = 0; nd < marginal.size(); ++nd) {
        csv << nd << ',' << fmt(marginal[nd]) << '\n';
    }
    write_output(csv.str(), cfg.out);
}

// ---------------------------------------------------------------------
// outage
// ---------------------------------------------------------------------

void cmd_outage(const RunConfig& cfg) {
    LadderPtr ladder = make_ladder(cfg);
    AnalysisPtr analysis = run_analysis(cfg, ladder);
    warn_analysis(analysis, cfg);

    std::vector<double> marginal(static_cast<size_t>(cfg.m) + 1, 0.0);
    qmd_analysis_marginal(analysis.get(), marginal.data(), marginal.size());

    if (cfg.format == "json") {
        json doc{{"config", config_to_json(cfg)},
                 {"outage", qmd_analysis_outage(analysis.get())},
                 {"diagnostic_shortfall", qmd_analysis_diagnostic_shortfall(analysis.get())},
                 {"iterations", qmd_analysis_iterations(analysis.get())},
                 {"residual", qmd_analysis_residual(analysis.get())},
                 {"marginal_nd", marginal}};
        write_output(doc.dump(2) + "\n", cfg.out);
        return;
    }

    std::ostringstream csv;
    csv << "m,d,c,w,f0,measure,outage,diagnostic_shortfall,iterations,residual\n";
    csv << cfg.m << ',' << cfg.d << ',' << cfg.c << ',' << cfg.w << ',';
    if (cfg.f0.has_value()) {
        csv << fmt(*cfg.f0);
    }
    csv << ',' << cfg.measure << ',' << fmt(qmd_analysis_outage(analysis.get())) << ','
        << fmt(qmd_analysis_diagnostic_shortfall(analysis.get())) << ','
        << qmd_analysis_iterations(analysis.get()) << ','
        << fmt(qmd_analysis_residual(analysis.get())) << '\n';
    csv << "\nnd,probability\n";
    for (size_t nd = 0; nd < marginal.size(); ++nd) {
        csv << nd << ',' << fmt(marginal[nd]) << '\n';
    }
    write_output(csv.str(), cfg.out);
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg) {
    LadderPtr ladder = make_ladder(cfg);

    qmd_sim_params params;
    qmd_sim_params_init(&params, cfg.m);
    params.consumption = cfg.c;
    params.bootstrap_wait = cfg.w;
    params.rounds = cfg.rounds;
    params.burn_in = cfg.burn_in;
    params.seed = cfg.seed;
    params.measure_point = measure_code(cfg);
    qmd_sim* raw = nullptr;
    const qmd_status status = qmd_sim_run(ladder.get(), &params, &raw);
    if (status != QMD_OK) {
        fail_status(status);
    }
    SimPtr sim(raw, &qmd_sim_free);

    AnalysisPtr analysis = run_analysis(cfg, ladder);
    warn_analysis(analysis, cfg);

    const size_t count = qmd_sim_state_count(sim.get());
    std::vector<double> empirical(count, 0.0);
    qmd_sim_occupancy(sim.get(), empirical.data(), count);
    std::vector<double> analytical(count, 0.0);
    qmd_analysis_probabilities(analysis.get(), analytical.data(), count);

    double tv = 0.0;
    for (size_t k = 0; k < count; ++k) {
        tv += std::abs(empirical[k] - analytical[k]);
    }
    tv *= 0.5;

    std::vector<double> sim_marginal(static_cast<size_t>(cfg.m) + 1, 0.0);
    qmd_sim_marginal(sim.get(), sim_marginal.data(), sim_marginal.size());
    std::vector<double> ana_marginal(static_cast<size_t>(cfg.m) + 1, 0.0);
    qmd_analysis_marginal(analysis.get(), ana_marginal.data(), ana_marginal.size());

    if (cfg.format == "json") {
        json doc{{"config", config_to_json(cfg)},
                 {"rounds_counted", qmd_sim_rounds_counted(sim.get())},
                 {"consumption_rounds", qmd_sim_consumption_rounds(sim.get())},
                 {"outage_events", qmd_sim_outage_events(sim.get())},
                 {"empirical_outage", qmd_sim_outage(sim.get())},
                 {"analytical_outage", qmd_analysis_outage(analysis.get())},
                 {"tv_distance", tv},
                 {"empirical_marginal_nd", sim_marginal},
                 {"analytical_marginal_nd", ana_marginal}};
        write_output(doc.dump(2) + "\n", cfg.out);
        return;
    }

    std::ostringstream csv;
    csv << "m,d,c,w,f0,seed,rounds,burn_in,rounds_counted,consumption_rounds,"
           "outage_events,empirical_outage,analytical_outage,tv_distance\n";
    csv << cfg.m << ',' << cfg.d << ',' << cfg.c << ',' << cfg.w << ',';
    if (cfg.f0.has_value()) {
        csv << fmt(*cfg.f0);
    }
    csv << ',' << cfg.seed << ',' << cfg.rounds << ',' << cfg.burn_in << ','
        << qmd_sim_rounds_counted(sim.get()) << ','
        << qmd_sim_consumption_rounds(sim.get()) << ','
        << qmd_sim_outage_events(sim.get()) << ',' << fmt(qmd_sim_outage(sim.get()))
        << ',' << fmt(qmd_analysis_outage(analysis.get())) << ',' << fmt(tv) << '\n';
    csv << "\nnd,empirical_probability,analytical_probability\n";
    for (size_t nd = 0; nd < sim_marginal.size(); ++nd) {
        csv << nd << ',' << fmt(sim_marginal[nd]) << ',' << fmt(ana_marginal[nd]) << '\n';
    }
    write_output(csv.str(), cfg.out);
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

struct SweepCliSpec {
    std::vector<double> f0;
    std::vector<int> w{0};
    int c = 1;
    int d = 2;
    int m_min = 1;
    int m_max = 1;
    double target = 1e-3;
    double tol = 1e-12;
    long max_iters = 1000000;
    std::string measure = "cycle-start";
    int threads = 0;
};

int env_threads() {
    const char* env = std::getenv("QMEMDIM_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0; // library default: hardware concurrency
    }
    return std::atoi(env);
}

void cmd_sweep(const SweepCliSpec& spec, const std::string& format,
               const std::string& out_path) {
    qmd_sweep_params params;
    qmd_sweep_params_init(&params);
    params.f0_values = spec.f0.data();
    params.f0_count = spec.f0.size();
    params.wait_values = spec.w.data();
    params.wait_count = spec.w.size();
    params.consumption = spec.c;
    params.max_steps = spec.d;
    params.m_min = spec.m_min;
    params.m_max = spec.m_max;
    params.target_outage = spec.target;
    params.tol = spec.tol;
    params.max_iterations = spec.max_iters;
    params.measure_point = spec.measure == "pre-consumption"
                               ? QMD_MEASURE_PRE_CONSUMPTION
                               : QMD_MEASURE_CYCLE_START;
    params.threads = spec.threads;

    qmd_sweep* raw = nullptr;
    const qmd_status status = qmd_sweep_run(&params, &raw);
    if (status != QMD_OK) {
        fail_status(status);
    }
    SweepPtr sweep(raw, &qmd_sweep_free);

    for (size_t i = 0; i < qmd_sweep_warning_count(sweep.get()); ++i) {
        warn(qmd_sweep_warning(sweep.get(), i));
    }

    const size_t rows = qmd_sweep_row_count(sweep.get());
    const size_t entries = qmd_sweep_min_memory_count(sweep.get());

    if (format == "json") {
        json spec_json{{"f0", spec.f0},         {"c", spec.c},
                       {"d", spec.d},           {"w", spec.w},
                       {"m_min", spec.m_min},   {"m_max", spec.m_max},
                       {"target", spec.target}, {"tol", spec.tol},
                       {"max_iters", spec.max_iters}, {"measure", spec.measure}};
        json row_array = json::array();
        for (size_t i = 0; i < rows; ++i) {
            qmd_sweep_row row;
            qmd_sweep_get_row(sweep.get(), i, &row);
            row_array.push_back(json{{"f0", row.f0},
                                     {"w", row.wait},
                                     {"m", row.memory_size},
                                     {"outage", row.outage},
                                     {"iterations", row.iterations},
                                     {"wall_time_s", row.wall_time_s},
                                     {"converged", row.converged != 0}});
        }
        json mins = json::array();
        for (size_t i = 0; i < entries; ++i) {
            double f0 = 0.0;
            int w = 0, m = -1;
            qmd_sweep_get_min_memory(sweep.get(), i, &f0, &w, &m);
            json entry{{"f0", f0}, {"w", w}};
            if (m >= 0) {
                entry["min_memory"] = m;
            } else {
                entry["min_memory"] = nullptr;
            }
            mins.push_back(entry);
        }
        json doc{{"spec", spec_json}, {"rows", row_array}, {"min_memory", mins}};
        write_output(doc.dump(2) + "\n", out_path);
        return;
    }

    std::ostringstream csv;
    csv << "f0,w,m,outage,iterations,converged\n";
    for (size_t i = 0; i < rows; ++i) {
        qmd_sweep_row row;
        qmd_sweep_get_row(sweep.get(), i, &row);
        csv << fmt(row.f0) << ',' << row.wait << ',' << row.memory_size << ','
            << fmt(row.outage) << ',' << row.iterations << ','
            << (row.converged != 0 ? "true" : "false") << '\n';
    }
    csv << "\nf0,w,min_memory\n";
    for (size_t i = 0; i < entries; ++i) {
        double f0 = 0.0;
        int w = 0, m = -1;
        qmd_sweep_get_min_memory(sweep.get(), i, &f0, &w, &m);
        csv << fmt(f0) << ',' << w << ',';
        if (m >= 0) {
            csv << m;
        }
        csv << '\n';
    }
    write_output(csv.str(), out_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum memory dimensioning for distilled EPR pairs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qmd_version()));

    // ladder
    CommonFlags ladder_flags;
    CLI::App* ladder_cmd =
        app.add_subcommand("ladder", "Print the distillation fidelity ladder");
    add_config_flag(ladder_cmd, ladder_flags);
    add_state_flags(ladder_cmd, ladder_flags, /*ladder_style=*/true);
    ladder_cmd->add_option("--d", ladder_flags.d, "Number of distillation steps");
    add_output_flags(ladder_cmd, ladder_flags);

    // stationary / outage / simulate share the analysis flags
    auto add_analysis_flags = [&](CLI::App* cmd, CommonFlags& flags) {
        add_config_flag(cmd, flags);
        add_state_flags(cmd, flags, /*ladder_style=*/false);
        cmd->add_option("--m", flags.m, "Memory size (qubit-pair slots)");
        cmd->add_option("--d", flags.d, "Maximum distillation steps");
        cmd->add_option("--c", flags.c, "Pairs consumed per consumption round");
        cmd->add_option("--w", flags.w, "Bootstrap waiting rounds per cycle");
        cmd->add_option("--tol", flags.tol, "Stationary solver L1 tolerance");
        cmd->add_option("--max-iters", flags.max_iters, "Stationary iteration budget");
        cmd->add_option("--measure", flags.measure,
                        "Outage measurement point: cycle-start or pre-consumption")
            ->check(CLI::IsMember({"cycle-start", "pre-consumption"}));
        add_output_flags(cmd, flags);
    };

    CommonFlags stationary_flags;
    CLI::App* stationary_cmd = app.add_subcommand(
        "stationary", "Stationary occupancy distribution and n_d marginal");
    add_analysis_flags(stationary_cmd, stationary_flags);
    stationary_cmd
        ->add_option("--solver", stationary_flags.solver,
                     "Stationary solver: power or direct (dense cross-check)")
        ->check(CLI::IsMember({"power", "direct"}));

    CommonFlags outage_flags;
    CLI::App* outage_cmd =
        app.add_subcommand("outage", "Stationary outage probability");
    add_analysis_flags(outage_cmd, outage_flags);
    outage_cmd
        ->add_option("--solver", outage_flags.solver,
                     "Stationary solver: power or direct (dense cross-check)")
        ->check(CLI::IsMember({"power", "direct"}));

    CommonFlags sim_flags;
    CLI::App* simulate_cmd = app.add_subcommand(
        "simulate", "Seeded Monte Carlo run with analytical comparison");
    add_analysis_flags(simulate_cmd, sim_flags);
    simulate_cmd->add_option("--rounds", sim_flags.rounds, "Simulated rounds");
    simulate_cmd->add_option("--burn-in", sim_flags.burn_in,
                             "Rounds discarded before statistics");
    simulate_cmd->add_option("--seed", sim_flags.seed, "PRNG seed");

    // sweep
    std::string sweep_spec_path, sweep_format = "csv", sweep_out = "-";
    SweepCliSpec sweep_flags;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Outage vs. memory sweeps and minimum-memory search");
    sweep_cmd->add_option("--spec", sweep_spec_path,
                          "JSON sweep spec {f0:[..],c,d,w:[..],m_min,m_max,target}");
    sweep_cmd->add_option("--f0", sweep_flags.f0, "Werner fidelities to sweep");
    sweep_cmd->add_option("--w", sweep_flags.w, "Bootstrap wait values to sweep");
    sweep_cmd->add_option("--c", sweep_flags.c, "Pairs consumed per round");
    sweep_cmd->add_option("--d", sweep_flags.d, "Maximum distillation steps");
    sweep_cmd->add_option("--m-min", sweep_flags.m_min, "Smallest memory size");
    sweep_cmd->add_option("--m-max", sweep_flags.m_max, "Largest memory size");
    sweep_cmd->add_option("--target", sweep_flags.target, "Target outage probability");
    sweep_cmd->add_option("--tol", sweep_flags.tol, "Stationary solver L1 tolerance");
    sweep_cmd->add_option("--max-iters", sweep_flags.max_iters,
                          "Stationary iteration budget");
    sweep_cmd
        ->add_option("--measure", sweep_flags.measure,
                     "Outage measurement point: cycle-start or pre-consumption")
        ->check(CLI::IsMember({"cycle-start", "pre-consumption"}));
    sweep_cmd->add_option("--threads", sweep_flags.threads,
                          "Worker threads (default: QMEMDIM_THREADS or hardware)");
    sweep_cmd->add_option("--format", sweep_format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_option("--out", sweep_out, "Output path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (ladder_cmd->parsed()) {
            cmd_ladder(resolve_config(ladder_cmd, ladder_flags, true));
        } else if (stationary_cmd->parsed()) {
            cmd_stationary(resolve_config(stationary_cmd, stationary_flags, false));
        } else if (outage_cmd->parsed()) {
            cmd_outage(resolve_config(outage_cmd, outage_flags, false));
        } else if (simulate_cmd->parsed()) {
            cmd_simulate(resolve_config(simulate_cmd, sim_flags, false));
        } else if (sweep_cmd->parsed()) {
            SweepCliSpec spec = sweep_flags;
            if (sweep_cmd->count("--threads") == 0) {
                spec.threads = env_threads();
            }
            if (!sweep_spec_path.empty()) {
                std::ifstream file(sweep_spec_path);
                if (!file) {
                    fail(2, "cannot read sweep spec: " + sweep_spec_path);
                }
                json j;
                try {
                    file >> j;
                } catch (const std::exception& e) {
                    fail(2, std::string("malformed sweep spec JSON: ") + e.what());
                }
                try {
                    if (sweep_cmd->count("--f0") == 0) spec.f0 = j.at("f0").get<std::vector<double>>();
                    if (sweep_cmd->count("--w") == 0 && j.contains("w"))
                        spec.w = j.at("w").get<std::vector<int>>();
                    if (sweep_cmd->count("--c") == 0) spec.c = j.at("c").get<int>();
                    if (sweep_cmd->count("--d") == 0) spec.d = j.at("d").get<int>();
                    if (sweep_cmd->count("--m-min") == 0) spec.m_min = j.at("m_min").get<int>();
                    if (sweep_cmd->count("--m-max") == 0) spec.m_max = j.at("m_max").get<int>();
                    if (sweep_cmd->count("--target") == 0)
                        spec.target = j.at("target").get<double>();
                    if (sweep_cmd->count("--tol") == 0 && j.contains("tol"))
                        spec.tol = j.at("tol").get<double>();
                    if (sweep_cmd->count("--max-iters") == 0 && j.contains("max_iters"))
                        spec.max_iters = j.at("max_iters").get<long>();
                    if (sweep_cmd->count("--measure") == 0 && j.contains("measure"))
                        spec.measure = j.at("measure").get<std::string>();
                    if (sweep_cmd->count("--threads") == 0 && j.contains("threads"))
                        spec.threads = j.at("threads").get<int>();
                } catch (const std::exception& e) {
                    fail(2, std::string("invalid sweep spec: ") + e.what());
                }
            }
            if (spec.f0.empty()) {
                fail(2, "sweep needs at least one f0 (flag --f0 or spec file)");
            }
            cmd_sweep(spec, sweep_format, sweep_out);
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
