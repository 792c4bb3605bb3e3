#ifndef QMEMDIM_MARKOV_HPP
#define QMEMDIM_MARKOV_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qmemdim/distillation.hpp"
#include "qmemdim/state_space.hpp"

namespace qmemdim {

// Per-round policy: c pairs consumed at the top fidelity on consumption
// rounds, W consumption-free waiting rounds per cycle.
struct RoundPolicy {
    int consumption = 1;   // c >= 0
    int bootstrap_wait = 0; // W >= 0

    void validate() const;

    // Uniqueness of the stationary distribution is guaranteed for c > 0 and
    // all success probabilities strictly below 1. False here is a warning,
    // not an error.
    bool ergodicity_guaranteed(const DistillationLadder& ladder) const;
};

// Counts of newly distilled pairs (n~_1, ..., n~_d) produced in one round.
using DistillOutcome = std::vector<int>;

// Row-stochastic sparse transition matrix over an enumerated state space,
// stored in CSR layout with rows in state-rank order.
class TransitionMatrix {
public:
    std::size_t dimension() const { return dim_; }
    std::size_t nonzero_count() const { return values_.size(); }

    std::span<const std::uint32_t> row_columns(std::size_t row) const;
    std::span<const double> row_values(std::size_t row) const;
    double row_sum(std::size_t row) const;

    // Entry lookup by binary search; 0 for absent entries.
    double entry(std::size_t row, std::size_t col) const;

    // out = in * P (left multiplication by a row vector).
    void apply(std::span<const double> in, std::span<double> out) const;

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> values_;

    friend TransitionMatrix build_transition_matrix(const StateSpace&,
                                                    const DistillationLadder&, int,
                                                    std::uint64_t);
};

// Probability of drawing the outcome (n~_1..n~_d) from `state`: the product
// of binomial pmfs B(floor(n_i/2), n~_{i+1}, p_{i->i+1}). `success_probs`
// holds the d per-level probabilities. Throws ValidationError when the
// outcome is out of bounds for the state.
double outcome_probability(std::span<const int> state, std::span<const int> outcome,
                           std::span<const double> success_probs);
double outcome_probability(std::span<const int> state, std::span<const int> outcome,
                           const DistillationLadder& ladder);

// State reached from `state` after one full round (distill with the given
// outcome, consume c at the top level, refill level 0):
//   n'_i = n~_i + (n_i mod 2)          for 0 < i < d
//   n'_d = max(n~_d + n_d - c, 0)
//   n'_0 = M - sum_{i>=1} n'_i
MemoryState apply_round(std::span<const int> state, std::span<const int> outcome,
                        int consumption);

// Exact one-round transition matrix: for every source state, all outcome
// vectors in the box prod_i [0, floor(n_i/2)] are enumerated in ascending
// lexicographic order and their probabilities accumulated on the target row
// entry (distinct outcomes may share a target). Throws CapacityError if the
// number of stored entries would exceed `max_entries`.
TransitionMatrix build_transition_matrix(const StateSpace& space,
                                         const DistillationLadder& ladder,
                                         int consumption,
                                         std::uint64_t max_entries = 400'000'000);

// Abstract one-step operator for stationary analysis.
class Chain {
public:
    virtual ~Chain() = default;
    virtual std::size_t dimension() const = 0;
    virtual void apply(std::span<const double> in, std::span<double> out) const = 0;
};

// Plain matrix chain (non-owning view).
class MatrixChain final : public Chain {
public:
    explicit MatrixChain(const TransitionMatrix& matrix) : matrix_(&matrix) {}
    std::size_t dimension() const override { return matrix_->dimension(); }
    void apply(std::span<const double> in, std::span<double> out) const override {
        matrix_->apply(in, out);
    }

private:
    const TransitionMatrix* matrix_;
};

// Bootstrap cycle operator P0^W * Pc, applied as W+1 successive sparse
// vector-matrix products; the dense product is never materialized.
class BootstrapChain final : public Chain {
public:
    // `no_consumption` must be built with c = 0 and `consumption` with the
    // cycle's c. Throws ValidationError on dimension mismatch or W < 0.
    BootstrapChain(const TransitionMatrix& no_consumption,
                   const TransitionMatrix& consumption, int wait_rounds);

    std::size_t dimension() const override { return consumption_->dimension(); }
    int wait_rounds() const { return wait_; }

    void apply(std::span<const double> in, std::span<double> out) const override;

    // Applies only the waiting part P0^W (identity for W = 0).
    void apply_wait(std::span<const double> in, std::span<double> out) const;

private:
    const TransitionMatrix* no_consumption_;
    const TransitionMatrix* consumption_;
    int wait_;
};

// Probability vector over the state space, indexed by state rank.
struct Distribution {
    std::vector<double> probs;

    static Distribution point_mass(std::size_t size, std::size_t index);
    static Distribution uniform(std::size_t size);

    double sum() const;
    // Entries nonnegative and summing to 1 within `tol`.
    void validate(double tol = 1e-10) const;
};

struct StationaryOptions {
    double tol = 1e-12;          // L1 change between successive iterates
    long max_iterations = 1'000'000;
};

struct StationaryResult {
    Distribution distribution;
    long iterations = 0;
    double residual = 0.0;
};

// Power iteration v <- vP from `start` until the L1 change drops below tol.
// Throws ConvergenceError (carrying iterations and the final residual) if
// the budget is exhausted first.
StationaryResult stationary(const Chain& chain, const Distribution& start,
                            const StationaryOptions& options = {});

// Dense direct solve of v P = v, sum(v) = 1 by Gaussian elimination; used as
// a cross-check for small spaces. Throws CapacityError above max_dimension.
Distribution stationary_direct(const Chain& chain, std::size_t max_dimension = 2000);

struct OutageReport {
    double outage_probability = 0.0;
    std::vector<double> marginal_nd; // marginal pmf of n_d, length M+1
    long iterations = 0;             // from the stationary solve, if any
    double residual = 0.0;
    bool ergodicity_warning = false; // c = 0 or some success prob equals 1
    bool trivial_warning = false;    // c > M: outage is 1 by construction
};

// Marginal pmf of n_d under a distribution over `space` (length M+1).
std::vector<double> nd_marginal(const Distribution& v, const StateSpace& space);

// Outage probability P(n_d < c) of a distribution over `space`, plus the
// full marginal of n_d. Requires c >= 1; c > M yields 1 with a warning flag.
OutageReport outage(const Distribution& v, const StateSpace& space, int consumption);

// Where outage is measured in the bootstrap cycle. The cycle-start state
// (the stationary vector of P0^W Pc itself, i.e. the state right after a
// consumption round) reproduces the reference design thresholds and is the
// default; the pre-consumption variant evaluates v_inf * P0^W instead.
enum class OutageMeasurePoint {
    kCycleStart,
    kPreConsumption,
};

enum class SolverKind {
    kPowerIteration,
    kDense,
};

struct AnalysisOptions {
    StationaryOptions solver;
    OutageMeasurePoint measure_point = OutageMeasurePoint::kCycleStart;
    SolverKind solver_kind = SolverKind::kPowerIteration;
};

// Full analytic pipeline for one configuration: build P_c (and P_0 when
// W > 0), solve for the stationary distribution of the cycle operator and
// evaluate outage at the configured measurement point.
struct ChainAnalysis {
    Distribution stationary_dist; // v_inf of the cycle operator
    Distribution measured;        // distribution outage was evaluated on
    OutageReport report;
    double diagnostic_shortfall = 0.0; // P(n_d + n~_d < c), one-step expansion
};

ChainAnalysis analyze_chain(const StateSpace& space, const DistillationLadder& ladder,
                            const RoundPolicy& policy, const AnalysisOptions& options = {});

// Convenience wrapper returning only the outage report.
OutageReport bootstrap_outage(const StateSpace& space, const DistillationLadder& ladder,
                              int consumption, int wait_rounds,
                              const AnalysisOptions& options = {});

// Secondary diagnostic: probability that even after the next distillation
// phase fewer than c pairs sit at the top level, P(n_d + n~_d < c), computed
// by a one-step expansion from `v`.
double consumption_shortfall_probability(const Distribution& v, const StateSpace& space,
                                         const DistillationLadder& ladder, int consumption);

} // namespace qmemdim

#endif
