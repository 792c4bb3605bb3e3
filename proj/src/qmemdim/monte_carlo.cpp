#include "qmemdim/monte_carlo.hpp"

#include <cassert>
#include <numeric>
#include <sstream>

#include "qmemdim/binomial.hpp"
#include "qmemdim/errors.hpp"

namespace qmemdim {

void SimConfig::validate() const {
    memory.validate();
    policy.validate();
    if (rounds < 1) {
        throw ValidationError("simulation needs at least one round");
    }
    if (burn_in < 0 || burn_in >= rounds) {
        std::ostringstream msg;
        msg << "burn-in (" << burn_in << ") must lie in [0, rounds)";
        throw ValidationError(msg.str());
    }
}

namespace {

// Triangular CDF table for one ladder level: cdf(n, k) = P(X <= k) for
// X ~ Binomial(n, p), n up to max_n.
class BinomialCdf {
public:
    BinomialCdf(int max_n, double p) {
        const BinomialPmf pmf(max_n, p);
        row_start_.resize(static_cast<std::size_t>(max_n) + 2);
        std::size_t total = 0;
        for (int n = 0; n <= max_n; ++n) {
            row_start_[static_cast<std::size_t>(n)] = total;
            total += static_cast<std::size_t>(n) + 1;
        }
        row_start_[static_cast<std::size_t>(max_n) + 1] = total;
        values_.resize(total);
        for (int n = 0; n <= max_n; ++n) {
            const auto row = pmf.row(n);
            double acc = 0.0;
            double* out = values_.data() + row_start_[static_cast<std::size_t>(n)];
            for (int k = 0; k <= n; ++k) {
                acc += row[static_cast<std::size_t>(k)];
                out[k] = acc;
            }
        }
    }

    // Inversion sampling: smallest k with u < cdf(n, k), capped at n.
    int sample(int n, double u) const {
        const double* cdf = values_.data() + row_start_[static_cast<std::size_t>(n)];
        int k = 0;
        while (k < n && u >= cdf[k]) {
            ++k;
        }
        return k;
    }

private:
    std::vector<double> values_;
    std::vector<std::size_t> row_start_;
};

} // namespace

SimResult simulate(const StateSpace& space, const DistillationLadder& ladder,
                   const SimConfig& config) {
    config.validate();
    if (space.config().memory_size != config.memory.memory_size ||
        space.config().max_steps != config.memory.max_steps) {
        throw ValidationError("state space does not match the simulation memory config");
    }
    if (ladder.max_steps() != config.memory.max_steps) {
        throw ValidationError("ladder depth does not match the simulation memory config");
    }

    const int d = config.memory.max_steps;
    const int m = config.memory.memory_size;
    const int c = config.policy.consumption;
    const int w = config.policy.bootstrap_wait;

    std::vector<BinomialCdf> cdf;
    cdf.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        cdf.emplace_back(m / 2, ladder.success_prob(i));
    }

    SimResult result;
    result.empirical_occupancy.assign(space.size(), 0.0);

    SplitMix64 rng(config.seed);
    MemoryState counts(static_cast<std::size_t>(d) + 1, 0);
    counts[0] = m; // start from state zero (M, 0, ..., 0)
    std::vector<int> produced(static_cast<std::size_t>(std::max(d, 1)), 0);

    for (long round = 0; round < config.rounds; ++round) {
        const bool consumption_round = (w == 0) || (round % (w + 1) == w);
        const bool counted = round >= config.burn_in;

        if (consumption_round && counted &&
            config.measure_point == OutageMeasurePoint::kPreConsumption &&
            counts[static_cast<std::size_t>(d)] < c) {
            ++result.outage_events;
        }

        // Distillation phase: one draw per level, every round, so the k-th
        // round always consumes generator outputs [k*d, k*d + d).
        for (int i = 0; i < d; ++i) {
            const double u = rng.next_double();
            produced[static_cast<std::size_t>(i)] =
                cdf[static_cast<std::size_t>(i)].sample(counts[static_cast<std::size_t>(i)] / 2, u);
        }

        // Consumption and refill (c applies only on consumption rounds).
        const int round_c = consumption_round ? c : 0;
        int used = 0;
        for (int i = d - 1; i >= 1; --i) {
            counts[static_cast<std::size_t>(i)] =
                produced[static_cast<std::size_t>(i) - 1] + counts[static_cast<std::size_t>(i)] % 2;
        }
        if (d >= 1) {
            const int nd = counts[static_cast<std::size_t>(d)] +
                           produced[static_cast<std::size_t>(d) - 1] - round_c;
            counts[static_cast<std::size_t>(d)] = nd > 0 ? nd : 0;
        }
        for (int i = 1; i <= d; ++i) {
            used += counts[static_cast<std::size_t>(i)];
        }
        counts[0] = m - used;

#ifndef NDEBUG
        assert(std::accumulate(counts.begin(), counts.end(), 0) == m);
        for (int v : counts) {
            assert(v >= 0);
        }
#endif

        if (consumption_round && counted) {
            ++result.consumption_rounds_counted;
            if (config.measure_point == OutageMeasurePoint::kCycleStart &&
                counts[static_cast<std::size_t>(d)] < c) {
                ++result.outage_events;
            }
            // Occupancy is sampled at cycle boundaries so it estimates the
            // stationary vector of the cycle operator for every W.
            result.empirical_occupancy[space.rank(counts)] += 1.0;
            ++result.rounds_counted;
        }
    }

    if (result.rounds_counted > 0) {
        for (double& x : result.empirical_occupancy) {
            x /= static_cast<double>(result.rounds_counted);
        }
    }
    if (result.consumption_rounds_counted > 0) {
        result.empirical_outage = static_cast<double>(result.outage_events) /
                                  static_cast<double>(result.consumption_rounds_counted);
    }
    return result;
}

std::vector<double> empirical_nd_marginal(const SimResult& result, const StateSpace& space) {
    if (result.empirical_occupancy.size() != space.size()) {
        throw ValidationError("simulation result does not match state space");
    }
    Distribution d;
    d.probs = result.empirical_occupancy;
    return nd_marginal(d, space);
}

} // namespace qmemdim
