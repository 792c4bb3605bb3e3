#include "qmemdim/dimensioning.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "qmemdim/errors.hpp"
#include "qmemdim/state_space.hpp"

namespace qmemdim {

void SweepSpec::validate() const {
    if (f0_values.empty()) {
        throw ValidationError("sweep needs at least one f0 value");
    }
    for (double f0 : f0_values) {
        if (!(f0 >= 0.0 && f0 <= 1.0)) {
            throw ValidationError("sweep f0 value outside [0,1]");
        }
    }
    if (wait_values.empty()) {
        throw ValidationError("sweep needs at least one wait value");
    }
    for (int w : wait_values) {
        if (w < 0) {
            throw ValidationError("sweep wait value must be >= 0");
        }
    }
    if (consumption < 1) {
        throw ValidationError("sweep consumption must be >= 1");
    }
    if (max_steps < 0) {
        throw ValidationError("sweep max_steps must be >= 0");
    }
    if (m_min < 1 || m_max < m_min) {
        throw ValidationError("sweep memory range is empty or invalid");
    }
    if (!(target_outage > 0.0 && target_outage < 1.0)) {
        throw ValidationError("sweep target outage must lie in (0,1)");
    }
}

namespace {

double evaluate_outage(const DistillationLadder& ladder, int m, int consumption, int wait,
                       const AnalysisOptions& options, long* iterations = nullptr) {
    const StateSpace space(MemoryConfig{m, ladder.max_steps()});
    const OutageReport report = bootstrap_outage(space, ladder, consumption, wait, options);
    if (iterations != nullptr) {
        *iterations = report.iterations;
    }
    return report.outage_probability;
}

} // namespace

SweepResult sweep(const SweepSpec& spec, int threads) {
    spec.validate();

    struct Cell {
        double f0;
        int wait;
        int m;
    };
    std::vector<Cell> cells;
    for (double f0 : spec.f0_values) {
        for (int w : spec.wait_values) {
            for (int m = spec.m_min; m <= spec.m_max; ++m) {
                cells.push_back({f0, w, m});
            }
        }
    }

    SweepResult result;
    result.rows.assign(cells.size(), SweepRow{});

    // Ladders depend on f0 only; build them once up front.
    std::map<double, DistillationLadder> ladders;
    for (double f0 : spec.f0_values) {
        ladders.emplace(f0, DistillationLadder(werner_state(f0), spec.max_steps));
    }

    auto run_cell = [&](std::size_t index) {
        const Cell& cell = cells[index];
        SweepRow& row = result.rows[index];
        row.f0 = cell.f0;
        row.wait = cell.wait;
        row.memory_size = cell.m;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            row.outage = evaluate_outage(ladders.at(cell.f0), cell.m, spec.consumption,
                                         cell.wait, spec.analysis, &row.iterations);
            row.converged = true;
        } catch (const ConvergenceError& e) {
            row.converged = false;
            row.iterations = e.iterations();
            row.outage = 1.0; // pessimistic placeholder; row is flagged
        }
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) {
        n_threads = 1;
    }
    if (n_threads == 1 || cells.size() < 2) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            run_cell(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells.size();
                     i = next.fetch_add(1)) {
                    run_cell(i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    // Minimum memory per (f0, w): first converged m in ascending order that
    // meets the target. The search over a dense grid makes the boundary
    // property (m-1 above target) hold by construction.
    const std::size_t m_count = static_cast<std::size_t>(spec.m_max - spec.m_min + 1);
    std::size_t base = 0;
    for (double f0 : spec.f0_values) {
        for (int w : spec.wait_values) {
            MinMemoryEntry entry;
            entry.f0 = f0;
            entry.wait = w;
            for (std::size_t j = 0; j < m_count; ++j) {
                const SweepRow& row = result.rows[base + j];
                if (row.converged && row.outage <= spec.target_outage) {
                    entry.memory_size = row.memory_size;
                    break;
                }
            }
            result.min_memory.push_back(entry);
            base += m_count;
        }
    }

    // The memory/latency trade-off is expected to be monotone (larger W
    // should not need more memory); flag violations instead of asserting.
    std::size_t idx = 0;
    for (double f0 : spec.f0_values) {
        std::optional<int> prev;
        int prev_w = 0;
        bool have_prev = false;
        for (int w : spec.wait_values) {
            const auto& entry = result.min_memory[idx++];
            if (have_prev && prev.has_value() && entry.memory_size.has_value() &&
                w > prev_w && *entry.memory_size > *prev) {
                std::ostringstream msg;
                msg << "min memory increased from " << *prev << " (W=" << prev_w << ") to "
                    << *entry.memory_size << " (W=" << w << ") at f0=" << f0;
                result.warnings.push_back(msg.str());
            }
            prev = entry.memory_size;
            prev_w = w;
            have_prev = true;
        }
    }
    return result;
}

std::optional<int> min_memory(const BellDiagonalState& initial, int consumption,
                              int max_steps, int wait, double target_outage, int m_lo,
                              int m_hi, const AnalysisOptions& options) {
    if (consumption < 1) {
        throw ValidationError("min_memory requires consumption >= 1");
    }
    if (wait < 0) {
        throw ValidationError("min_memory requires wait >= 0");
    }
    if (!(target_outage > 0.0 && target_outage < 1.0)) {
        throw ValidationError("min_memory target outage must lie in (0,1)");
    }
    if (m_lo < 1 || m_hi < m_lo) {
        throw ValidationError("min_memory search range is empty or invalid");
    }

    const DistillationLadder ladder(initial, max_steps);
    std::map<int, double> cache;
    auto meets = [&](int m) {
        auto it = cache.find(m);
        if (it == cache.end()) {
            it = cache.emplace(m, evaluate_outage(ladder, m, consumption, wait, options))
                     .first;
        }
        return it->second <= target_outage;
    };

    if (meets(m_lo)) {
        return m_lo; // nothing below m_lo is in range, boundary holds trivially
    }

    // Exponential probe for the first success, then bisection down to the
    // boundary pair; both boundary points are evaluated, never assumed.
    int lo = m_lo; // known failure
    int hi = -1;   // known success
    int step = 1;
    while (lo < m_hi) {
        const int probe = std::min(lo + step, m_hi);
        if (meets(probe)) {
            hi = probe;
            break;
        }
        lo = probe;
        step *= 2;
    }
    if (hi < 0) {
        return std::nullopt;
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (meets(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // lo = hi-1 failed and hi passed; both were computed above.
    return hi;
}

std::optional<int> min_memory(double f0, int consumption, int max_steps, int wait,
                              double target_outage, int m_lo, int m_hi,
                              const AnalysisOptions& options) {
    return min_memory(werner_state(f0), consumption, max_steps, wait, target_outage, m_lo,
                      m_hi, options);
}

} // namespace qmemdim
