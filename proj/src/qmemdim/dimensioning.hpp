#ifndef QMEMDIM_DIMENSIONING_HPP
#define QMEMDIM_DIMENSIONING_HPP

#include <optional>
#include <string>
#include <vector>

#include "qmemdim/distillation.hpp"
#include "qmemdim/markov.hpp"

namespace qmemdim {

// Grid specification for outage-vs-memory sweeps.
struct SweepSpec {
    std::vector<double> f0_values;  // Werner fidelities of the raw pairs
    int consumption = 1;            // c
    int max_steps = 0;              // d
    std::vector<int> wait_values;   // bootstrap W values
    int m_min = 1;
    int m_max = 1;
    double target_outage = 1e-3;
    AnalysisOptions analysis;

    void validate() const;
};

struct SweepRow {
    double f0 = 0.0;
    int wait = 0;
    int memory_size = 0;
    double outage = 0.0;
    long iterations = 0;
    double wall_time_s = 0.0;
    bool converged = true;
};

struct MinMemoryEntry {
    double f0 = 0.0;
    int wait = 0;
    std::optional<int> memory_size; // absent when no M in range meets the target
};

struct SweepResult {
    std::vector<SweepRow> rows;            // ordered by (f0, w, m), following the SweepSpec lists
    std::vector<MinMemoryEntry> min_memory; // one entry per (f0, w)
    std::vector<std::string> warnings;      // e.g. monotonicity violations
};

// Evaluates every (f0, w, m) cell of the grid. Rows are emitted in SweepSpec
// order regardless of execution order; cells may run on `threads` worker
// threads (0 = hardware concurrency). Solver failures mark the row
// unconverged instead of aborting the sweep.
SweepResult sweep(const SweepSpec& spec, int threads = 0);

// Smallest M in [m_lo, m_hi] with outage <= target. Monotonicity in M is
// used only to accelerate the search (exponential probe plus bisection);
// the returned boundary is always verified explicitly: outage(M) <= target
// and, when M-1 is in range, outage(M-1) > target.
std::optional<int> min_memory(double f0, int consumption, int max_steps, int wait,
                              double target_outage, int m_lo, int m_hi,
                              const AnalysisOptions& options = {});

// Same search for an explicit initial state.
std::optional<int> min_memory(const BellDiagonalState& initial, int consumption,
                              int max_steps, int wait, double target_outage, int m_lo,
                              int m_hi, const AnalysisOptions& options = {});

} // namespace qmemdim

#endif
