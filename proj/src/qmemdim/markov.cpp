#include "qmemdim/markov.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qmemdim/binomial.hpp"
#include "qmemdim/errors.hpp"

namespace qmemdim {

void RoundPolicy::validate() const {
    if (consumption < 0) {
        throw ValidationError("consumption must be >= 0");
    }
    if (bootstrap_wait < 0) {
        throw ValidationError("bootstrap wait must be >= 0");
    }
}

bool RoundPolicy::ergodicity_guaranteed(const DistillationLadder& ladder) const {
    if (consumption <= 0) {
        return false;
    }
    for (double p : ladder.success_probs()) {
        if (!(p > 0.0 && p < 1.0)) {
            return false;
        }
    }
    return true;
}

std::span<const std::uint32_t> TransitionMatrix::row_columns(std::size_t row) const {
    return {cols_.data() + row_start_[row], row_start_[row + 1] - row_start_[row]};
}

std::span<const double> TransitionMatrix::row_values(std::size_t row) const {
    return {values_.data() + row_start_[row], row_start_[row + 1] - row_start_[row]};
}

double TransitionMatrix::row_sum(std::size_t row) const {
    double s = 0.0;
    for (double v : row_values(row)) {
        s += v;
    }
    return s;
}

double TransitionMatrix::entry(std::size_t row, std::size_t col) const {
    const auto cols = row_columns(row);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(col));
    if (it == cols.end() || *it != col) {
        return 0.0;
    }
    return values_[row_start_[row] + static_cast<std::size_t>(it - cols.begin())];
}

void TransitionMatrix::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != dim_ || out.size() != dim_) {
        throw ValidationError("vector length does not match matrix dimension");
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t row = 0; row < dim_; ++row) {
        const double w = in[row];
        if (w == 0.0) {
            continue;
        }
        const std::size_t begin = row_start_[row];
        const std::size_t end = row_start_[row + 1];
        for (std::size_t k = begin; k < end; ++k) {
            out[cols_[k]] += w * values_[k];
        }
    }
}

namespace {

// Checks 0 <= outcome[i] <= floor(state[i]/2) and matching lengths.
void check_outcome_bounds(std::span<const int> state, std::span<const int> outcome) {
    if (state.empty()) {
        throw ValidationError("occupancy vector is empty");
    }
    if (outcome.size() + 1 != state.size()) {
        std::ostringstream msg;
        msg << "outcome vector has length " << outcome.size() << ", expected "
            << state.size() - 1;
        throw ValidationError(msg.str());
    }
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        const int cap = state[i] / 2;
        if (outcome[i] < 0 || outcome[i] > cap) {
            std::ostringstream msg;
            msg << "outcome[" << i << "] = " << outcome[i] << " outside [0," << cap << "]";
            throw ValidationError(msg.str());
        }
    }
}

} // namespace

double outcome_probability(std::span<const int> state, std::span<const int> outcome,
                           std::span<const double> success_probs) {
    check_outcome_bounds(state, outcome);
    if (success_probs.size() != outcome.size()) {
        throw ValidationError("success probability list does not match outcome length");
    }
    double prob = 1.0;
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        const int n = state[i] / 2;
        const BinomialPmf pmf(n, success_probs[i]);
        prob *= pmf(n, outcome[i]);
    }
    return prob;
}

double outcome_probability(std::span<const int> state, std::span<const int> outcome,
                           const DistillationLadder& ladder) {
    return outcome_probability(state, outcome, ladder.success_probs());
}

MemoryState apply_round(std::span<const int> state, std::span<const int> outcome,
                        int consumption) {
    check_outcome_bounds(state, outcome);
    if (consumption < 0) {
        throw ValidationError("consumption must be >= 0");
    }
    const int d = static_cast<int>(state.size()) - 1;
    const int m = std::accumulate(state.begin(), state.end(), 0);
    MemoryState next(static_cast<std::size_t>(d) + 1, 0);
    for (int i = 1; i < d; ++i) {
        next[static_cast<std::size_t>(i)] =
            outcome[static_cast<std::size_t>(i) - 1] + state[static_cast<std::size_t>(i)] % 2;
    }
    if (d >= 1) {
        next[static_cast<std::size_t>(d)] =
            std::max(outcome[static_cast<std::size_t>(d) - 1] +
                         state[static_cast<std::size_t>(d)] - consumption,
                     0);
    }
    const int used = std::accumulate(next.begin() + 1, next.end(), 0);
    next[0] = m - used; // refill
    assert(next[0] >= 0);
    return next;
}

TransitionMatrix build_transition_matrix(const StateSpace& space,
                                         const DistillationLadder& ladder,
                                         int consumption, std::uint64_t max_entries) {
    if (ladder.max_steps() != space.config().max_steps) {
        throw ValidationError("ladder depth does not match the state space");
    }
    if (consumption < 0) {
        throw ValidationError("consumption must be >= 0");
    }
    const int d = space.config().max_steps;
    const int m = space.config().memory_size;
    const std::size_t n_states = space.size();

    std::vector<BinomialPmf> pmf;
    pmf.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        pmf.emplace_back(m / 2, ladder.success_prob(i));
    }

    TransitionMatrix matrix;
    matrix.dim_ = n_states;
    matrix.row_start_.assign(n_states + 1, 0);

    std::vector<double> row_accum(n_states, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<int> outcome(static_cast<std::size_t>(std::max(d, 1)), 0);
    std::vector<int> target(static_cast<std::size_t>(d) + 1, 0);

    for (std::size_t row = 0; row < n_states; ++row) {
        const std::span<const int> state = space.state(row);
        touched.clear();

        // Ascending lexicographic odometer over the outcome box.
        std::fill(outcome.begin(), outcome.begin() + d, 0);
        while (true) {
            double prob = 1.0;
            for (int i = 0; i < d; ++i) {
                prob *= pmf[static_cast<std::size_t>(i)](
                    state[static_cast<std::size_t>(i)] / 2,
                    outcome[static_cast<std::size_t>(i)]);
            }

            if (prob > 0.0) {
                // Target state of this outcome under distill/consume/refill.
                for (int i = 1; i < d; ++i) {
                    target[static_cast<std::size_t>(i)] =
                        outcome[static_cast<std::size_t>(i) - 1] +
                        state[static_cast<std::size_t>(i)] % 2;
                }
                if (d >= 1) {
                    target[static_cast<std::size_t>(d)] =
                        std::max(outcome[static_cast<std::size_t>(d) - 1] +
                                     state[static_cast<std::size_t>(d)] - consumption,
                                 0);
                }
                int used = 0;
                for (int i = 1; i <= d; ++i) {
                    used += target[static_cast<std::size_t>(i)];
                }
                target[0] = m - used;

                const std::size_t col = space.rank(target);
                // Sums of positive terms stay positive, so zero marks untouched.
                if (row_accum[col] == 0.0) {
                    touched.push_back(static_cast<std::uint32_t>(col));
                }
                row_accum[col] += prob;
            }

            // Advance the odometer: least-significant coordinate is the last.
            int level = d - 1;
            while (level >= 0) {
                if (outcome[static_cast<std::size_t>(level)] <
                    state[static_cast<std::size_t>(level)] / 2) {
                    ++outcome[static_cast<std::size_t>(level)];
                    std::fill(outcome.begin() + level + 1, outcome.begin() + d, 0);
                    break;
                }
                --level;
            }
            if (level < 0) {
                break;
            }
        }

        std::sort(touched.begin(), touched.end());
        if (matrix.values_.size() + touched.size() > max_entries) {
            std::ostringstream msg;
            msg << "transition matrix exceeds the entry budget of " << max_entries;
            throw CapacityError(msg.str());
        }
        for (std::uint32_t col : touched) {
            matrix.cols_.push_back(col);
            matrix.values_.push_back(row_accum[col]);
            row_accum[col] = 0.0;
        }
        matrix.row_start_[row + 1] = matrix.values_.size();
    }
    return matrix;
}

BootstrapChain::BootstrapChain(const TransitionMatrix& no_consumption,
                               const TransitionMatrix& consumption, int wait_rounds)
    : no_consumption_(&no_consumption), consumption_(&consumption), wait_(wait_rounds) {
    if (wait_rounds < 0) {
        throw ValidationError("bootstrap wait must be >= 0");
    }
    if (no_consumption.dimension() != consumption.dimension()) {
        throw ValidationError("bootstrap chain matrices have mismatched dimensions");
    }
}

void BootstrapChain::apply_wait(std::span<const double> in, std::span<double> out) const {
    if (wait_ == 0) {
        if (out.data() != in.data()) {
            std::copy(in.begin(), in.end(), out.begin());
        }
        return;
    }
    std::vector<double> front(in.begin(), in.end());
    std::vector<double> back(in.size(), 0.0);
    for (int w = 0; w < wait_; ++w) {
        no_consumption_->apply(front, back);
        front.swap(back);
    }
    std::copy(front.begin(), front.end(), out.begin());
}

void BootstrapChain::apply(std::span<const double> in, std::span<double> out) const {
    std::vector<double> staged(in.size());
    apply_wait(in, staged);
    consumption_->apply(staged, out);
}

Distribution Distribution::point_mass(std::size_t size, std::size_t index) {
    if (index >= size) {
        throw ValidationError("point mass index out of range");
    }
    Distribution d;
    d.probs.assign(size, 0.0);
    d.probs[index] = 1.0;
    return d;
}

Distribution Distribution::uniform(std::size_t size) {
    if (size == 0) {
        throw ValidationError("distribution must have at least one state");
    }
    Distribution d;
    d.probs.assign(size, 1.0 / static_cast<double>(size));
    return d;
}

double Distribution::sum() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

void Distribution::validate(double tol) const {
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw ValidationError("distribution has a negative entry");
        }
    }
    if (std::abs(sum() - 1.0) > tol) {
        std::ostringstream msg;
        msg << "distribution sums to " << sum() << ", expected 1";
        throw ValidationError(msg.str());
    }
}

StationaryResult stationary(const Chain& chain, const Distribution& start,
                            const StationaryOptions& options) {
    if (options.tol <= 0.0) {
        throw ValidationError("stationary tolerance must be > 0");
    }
    if (start.probs.size() != chain.dimension()) {
        throw ValidationError("start distribution does not match chain dimension");
    }
    start.validate();

    std::vector<double> v = start.probs;
    std::vector<double> w(v.size(), 0.0);
    double residual = 0.0;
    for (long it = 1; it <= options.max_iterations; ++it) {
        chain.apply(v, w);
        double s = std::accumulate(w.begin(), w.end(), 0.0);
        if (s > 0.0) {
            for (double& x : w) {
                x /= s;
            }
        }
        residual = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            residual += std::abs(w[i] - v[i]);
        }
        v.swap(w);
        if (residual < options.tol) {
            StationaryResult result;
            result.distribution.probs = std::move(v);
            result.iterations = it;
            result.residual = residual;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not reach tol " << options.tol << " in "
        << options.max_iterations << " iterations (residual " << residual << ")";
    throw ConvergenceError(msg.str(), options.max_iterations, residual);
}

Distribution stationary_direct(const Chain& chain, std::size_t max_dimension) {
    const std::size_t n = chain.dimension();
    if (n > max_dimension) {
        std::ostringstream msg;
        msg << "direct solve limited to " << max_dimension << " states, chain has " << n;
        throw CapacityError(msg.str());
    }

    // Materialize A = P^T - I column by column (chain applied to unit rows),
    // then replace the last equation by the normalization sum(v) = 1.
    std::vector<double> a(n * n, 0.0);
    std::vector<double> basis(n, 0.0);
    std::vector<double> image(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(basis.begin(), basis.end(), 0.0);
        basis[i] = 1.0;
        chain.apply(basis, image);
        for (std::size_t j = 0; j < n; ++j) {
            a[j * n + i] = image[j]; // (P^T)_{j,i} = P_{i,j}
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        a[i * n + i] -= 1.0;
    }
    std::vector<double> rhs(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        a[(n - 1) * n + j] = 1.0;
    }
    rhs[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(a[k * n + k]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double mag = std::abs(a[r * n + k]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0) {
            throw ConvergenceError("singular system in direct stationary solve", 0, 0.0);
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a[k * n + j], a[pivot * n + j]);
            }
            std::swap(rhs[k], rhs[pivot]);
        }
        const double diag = a[k * n + k];
        for (std::size_t r = k + 1; r < n; ++r) {
            const double factor = a[r * n + k] / diag;
            if (factor == 0.0) {
                continue;
            }
            a[r * n + k] = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                a[r * n + j] -= factor * a[k * n + j];
            }
            rhs[r] -= factor * rhs[k];
        }
    }
    Distribution v;
    v.probs.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = rhs[ri];
        for (std::size_t j = ri + 1; j < n; ++j) {
            acc -= a[ri * n + j] * v.probs[j];
        }
        v.probs[ri] = acc / a[ri * n + ri];
    }
    // Clamp tiny negative round-off and renormalize.
    for (double& p : v.probs) {
        if (p < 0.0 && p > -1e-12) {
            p = 0.0;
        }
    }
    const double s = v.sum();
    if (s > 0.0) {
        for (double& p : v.probs) {
            p /= s;
        }
    }
    return v;
}

std::vector<double> nd_marginal(const Distribution& v, const StateSpace& space) {
    if (v.probs.size() != space.size()) {
        throw ValidationError("distribution does not match state space");
    }
    const int m = space.config().memory_size;
    const int d = space.config().max_steps;
    std::vector<double> marginal(static_cast<std::size_t>(m) + 1, 0.0);
    for (std::size_t k = 0; k < space.size(); ++k) {
        const int nd = space.state(k)[static_cast<std::size_t>(d)];
        marginal[static_cast<std::size_t>(nd)] += v.probs[k];
    }
    return marginal;
}

OutageReport outage(const Distribution& v, const StateSpace& space, int consumption) {
    if (consumption < 1) {
        throw ValidationError("outage requires consumption >= 1");
    }
    const int m = space.config().memory_size;

    OutageReport report;
    report.marginal_nd = nd_marginal(v, space);
    const int cutoff = std::min(consumption, m + 1);
    double out = 0.0;
    for (int nd = 0; nd < cutoff; ++nd) {
        out += report.marginal_nd[static_cast<std::size_t>(nd)];
    }
    report.outage_probability = out;
    report.trivial_warning = consumption > m;
    return report;
}

double consumption_shortfall_probability(const Distribution& v, const StateSpace& space,
                                         const DistillationLadder& ladder, int consumption) {
    if (consumption < 1) {
        throw ValidationError("shortfall diagnostic requires consumption >= 1");
    }
    if (v.probs.size() != space.size()) {
        throw ValidationError("distribution does not match state space");
    }
    const int d = space.config().max_steps;
    const int m = space.config().memory_size;
    if (d == 0) {
        // No distillation phase: shortfall is simply P(n_0 < c).
        double p = 0.0;
        for (std::size_t k = 0; k < space.size(); ++k) {
            if (space.state(k)[0] < consumption) {
                p += v.probs[k];
            }
        }
        return p;
    }
    const BinomialPmf pmf(m / 2, ladder.success_prob(d - 1));
    double total = 0.0;
    for (std::size_t k = 0; k < space.size(); ++k) {
        const auto state = space.state(k);
        if (v.probs[k] == 0.0) {
            continue;
        }
        const int nd = state[static_cast<std::size_t>(d)];
        const int attempts = state[static_cast<std::size_t>(d) - 1] / 2;
        double partial = 0.0;
        for (int add = 0; add <= attempts && nd + add < consumption; ++add) {
            partial += pmf(attempts, add);
        }
        total += v.probs[k] * partial;
    }
    return total;
}

ChainAnalysis analyze_chain(const StateSpace& space, const DistillationLadder& ladder,
                            const RoundPolicy& policy, const AnalysisOptions& options) {
    policy.validate();
    if (ladder.max_steps() != space.config().max_steps) {
        throw ValidationError("ladder depth does not match the state space");
    }

    const TransitionMatrix consumption_matrix =
        build_transition_matrix(space, ladder, policy.consumption);

    ChainAnalysis analysis;
    const Distribution start = Distribution::point_mass(space.size(), space.zero_state_index());

    auto solve = [&](const Chain& chain) {
        if (options.solver_kind == SolverKind::kDense) {
            StationaryResult r;
            r.distribution = stationary_direct(chain);
            r.iterations = 0;
            r.residual = 0.0;
            return r;
        }
        return stationary(chain, start, options.solver);
    };

    StationaryResult solved;
    if (policy.bootstrap_wait == 0) {
        const MatrixChain chain(consumption_matrix);
        solved = solve(chain);
        analysis.stationary_dist = solved.distribution;
        analysis.measured = analysis.stationary_dist;
    } else {
        const TransitionMatrix wait_matrix = build_transition_matrix(space, ladder, 0);
        const BootstrapChain chain(wait_matrix, consumption_matrix, policy.bootstrap_wait);
        solved = solve(chain);
        analysis.stationary_dist = solved.distribution;
        if (options.measure_point == OutageMeasurePoint::kPreConsumption) {
            Distribution staged;
            staged.probs.assign(space.size(), 0.0);
            chain.apply_wait(analysis.stationary_dist.probs, staged.probs);
            analysis.measured = std::move(staged);
        } else {
            analysis.measured = analysis.stationary_dist;
        }
    }

    if (policy.consumption >= 1) {
        analysis.report = outage(analysis.measured, space, policy.consumption);
    } else {
        // c = 0: consumption never fails; keep the marginal for reporting.
        analysis.report.marginal_nd = nd_marginal(analysis.measured, space);
        analysis.report.outage_probability = 0.0;
    }
    analysis.report.iterations = solved.iterations;
    analysis.report.residual = solved.residual;

    analysis.report.ergodicity_warning = !policy.ergodicity_guaranteed(ladder);
    if (policy.consumption >= 1) {
        analysis.diagnostic_shortfall = consumption_shortfall_probability(
            analysis.measured, space, ladder, policy.consumption);
    }
    return analysis;
}

OutageReport bootstrap_outage(const StateSpace& space, const DistillationLadder& ladder,
                              int consumption, int wait_rounds,
                              const AnalysisOptions& options) {
    RoundPolicy policy{consumption, wait_rounds};
    return analyze_chain(space, ladder, policy, options).report;
}

} // namespace qmemdim
