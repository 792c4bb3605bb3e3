#ifndef QMEMDIM_STATE_SPACE_HPP
#define QMEMDIM_STATE_SPACE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace qmemdim {

// Memory geometry: M qubit-pair slots, at most d distillation steps.
struct MemoryConfig {
    int memory_size = 1; // M >= 1
    int max_steps = 0;   // d >= 0

    void validate() const;
};

// Occupancy vector (n_0, ..., n_d) with sum M.
using MemoryState = std::vector<int>;

// Enumerated, immutable state space of all occupancy vectors for a given
// memory configuration. States are ordered lexicographically with n_0
// descending first, so (M, 0, ..., 0) always has rank 0 and rankings are
// stable across runs. Size is C(M+d, d).
class StateSpace {
public:
    static constexpr std::uint64_t kDefaultMaxStates = 10'000'000;

    // Throws CapacityError if the state count exceeds `max_states` (or does
    // not fit in 64 bits at all).
    explicit StateSpace(const MemoryConfig& config,
                        std::uint64_t max_states = kDefaultMaxStates);

    const MemoryConfig& config() const { return config_; }
    std::size_t size() const { return count_; }
    int parts() const { return config_.max_steps + 1; }

    // Unrank: occupancy vector of the state with the given index.
    std::span<const int> state(std::size_t index) const;

    // Rank: index of an occupancy vector, computed in O(d) arithmetic from
    // the combinatorial number system (no table lookup of the state list).
    // Throws ValidationError for vectors of wrong length, negative entries
    // or wrong sum.
    std::size_t rank(std::span<const int> counts) const;

    // Index of (M, 0, ..., 0); always 0 under the descending ordering.
    std::size_t zero_state_index() const { return 0; }

    // C(M+d, d) with overflow detection; throws CapacityError on overflow.
    static std::uint64_t count_states(const MemoryConfig& config);

private:
    MemoryConfig config_;
    std::size_t count_ = 0;
    std::vector<int> flat_;               // count_ * parts(), row-major
    std::vector<std::uint64_t> pascal_;   // C(n,k) for n <= M+d, k <= d+1
    std::uint64_t binom(int n, int k) const;
};

} // namespace qmemdim

#endif
