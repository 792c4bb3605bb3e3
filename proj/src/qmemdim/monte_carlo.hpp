#ifndef QMEMDIM_MONTE_CARLO_HPP
#define QMEMDIM_MONTE_CARLO_HPP

#include <cstdint>
#include <vector>

#include "qmemdim/distillation.hpp"
#include "qmemdim/markov.hpp"
#include "qmemdim/state_space.hpp"

namespace qmemdim {

// SplitMix64: a counter-based 64-bit generator (Weyl sequence plus a mixing
// function). Chosen for bit-reproducible trajectories independent of
// platform; the k-th output is a pure function of (seed, k).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

struct SimConfig {
    MemoryConfig memory;
    RoundPolicy policy;
    long rounds = 0;          // total simulated rounds, >= 1
    long burn_in = 0;         // rounds discarded before statistics, < rounds
    std::uint64_t seed = 0;
    OutageMeasurePoint measure_point = OutageMeasurePoint::kCycleStart;

    void validate() const;
};

struct SimResult {
    // Occupancy frequencies over the state space, sampled at cycle
    // boundaries (after each consumption round; every round when W = 0).
    std::vector<double> empirical_occupancy;
    double empirical_outage = 0.0;
    long outage_events = 0;
    long rounds_counted = 0;             // rounds contributing to occupancy
    long consumption_rounds_counted = 0; // denominators of empirical_outage
};

// Seeded trajectory of the round protocol (distill, consume, refill).
// Identical seeds produce bit-identical results.
SimResult simulate(const StateSpace& space, const DistillationLadder& ladder,
                   const SimConfig& config);

// Marginal of n_d under the empirical occupancy.
std::vector<double> empirical_nd_marginal(const SimResult& result, const StateSpace& space);

} // namespace qmemdim

#endif
