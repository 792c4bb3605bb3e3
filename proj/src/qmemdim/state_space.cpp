#include "qmemdim/state_space.hpp"

#include <cassert>
#include <limits>
#include <numeric>
#include <sstream>

#include "qmemdim/errors.hpp"

namespace qmemdim {

void MemoryConfig::validate() const {
    if (memory_size < 1) {
        throw ValidationError("memory size must be >= 1");
    }
    if (max_steps < 0) {
        throw ValidationError("maximum distillation steps must be >= 0");
    }
}

std::uint64_t StateSpace::count_states(const MemoryConfig& config) {
    config.validate();
    // C(M+d, d) via the multiplicative recurrence, checking for overflow.
    std::uint64_t count = 1;
    const auto m = static_cast<std::uint64_t>(config.memory_size);
    for (std::uint64_t k = 1; k <= static_cast<std::uint64_t>(config.max_steps); ++k) {
        std::uint64_t next;
        if (__builtin_mul_overflow(count, m + k, &next)) {
            std::ostringstream msg;
            msg << "state count C(" << config.memory_size + config.max_steps << ","
                << config.max_steps << ") overflows 64-bit arithmetic";
            throw CapacityError(msg.str());
        }
        count = next / k; // exact: C(m+k, k) = C(m+k-1, k-1) * (m+k) / k
    }
    return count;
}

StateSpace::StateSpace(const MemoryConfig& config, std::uint64_t max_states)
    : config_(config) {
    const std::uint64_t count = count_states(config);
    if (count > max_states) {
        std::ostringstream msg;
        msg << "state space has " << count << " states, exceeding the budget of "
            << max_states;
        throw CapacityError(msg.str());
    }
    count_ = static_cast<std::size_t>(count);

    const int d = config_.max_steps;
    const int m = config_.memory_size;

    // Pascal table rows 0..M+d, columns 0..d+1, used by rank().
    const int rows = m + d + 1;
    const int cols = d + 2;
    pascal_.assign(static_cast<std::size_t>(rows) * cols, 0);
    for (int n = 0; n < rows; ++n) {
        pascal_[static_cast<std::size_t>(n) * cols] = 1;
        for (int k = 1; k < cols && k <= n; ++k) {
            const std::size_t row = static_cast<std::size_t>(n) * cols;
            const std::size_t prev = static_cast<std::size_t>(n - 1) * cols;
            pascal_[row + k] = pascal_[prev + k - 1] + (k <= n - 1 ? pascal_[prev + k] : 0);
        }
    }

    // Enumerate all compositions of M into d+1 parts, n_0 descending first.
    flat_.reserve(count_ * static_cast<std::size_t>(parts()));
    std::vector<int> current(static_cast<std::size_t>(parts()), 0);
    auto emit = [&](auto&& self, int level, int remaining) -> void {
        if (level == d) {
            current[static_cast<std::size_t>(level)] = remaining;
            flat_.insert(flat_.end(), current.begin(), current.end());
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            current[static_cast<std::size_t>(level)] = v;
            self(self, level + 1, remaining - v);
        }
    };
    emit(emit, 0, m);
    assert(flat_.size() == count_ * static_cast<std::size_t>(parts()));
    assert(rank(state(0)) == 0 && state(0)[0] == m);
}

std::span<const int> StateSpace::state(std::size_t index) const {
    if (index >= count_) {
        std::ostringstream msg;
        msg << "state index " << index << " out of range (count " << count_ << ")";
        throw ValidationError(msg.str());
    }
    const auto stride = static_cast<std::size_t>(parts());
    return {flat_.data() + index * stride, stride};
}

std::uint64_t StateSpace::binom(int n, int k) const {
    if (k < 0 || k > n) {
        return 0;
    }
    const int cols = config_.max_steps + 2;
    assert(n <= config_.memory_size + config_.max_steps && k < cols);
    return pascal_[static_cast<std::size_t>(n) * cols + k];
}

std::size_t StateSpace::rank(std::span<const int> counts) const {
    const int d = config_.max_steps;
    if (counts.size() != static_cast<std::size_t>(d + 1)) {
        throw ValidationError("occupancy vector has wrong length");
    }
    int sum = 0;
    for (int v : counts) {
        if (v < 0) {
            throw ValidationError("occupancy vector has a negative entry");
        }
        sum += v;
    }
    if (sum != config_.memory_size) {
        std::ostringstream msg;
        msg << "occupancy vector sums to " << sum << ", expected " << config_.memory_size;
        throw ValidationError(msg.str());
    }

    // Descending lexicographic rank: at coordinate j with remaining sum S,
    // every composition whose j-th part exceeds counts[j] precedes this one;
    // there are C(S - n_j - 1 + (d-j), d-j) of them.
    std::uint64_t r = 0;
    int remaining = config_.memory_size;
    for (int j = 0; j < d; ++j) {
        const int nj = counts[static_cast<std::size_t>(j)];
        r += binom(remaining - nj - 1 + d - j, d - j);
        remaining -= nj;
    }
    return static_cast<std::size_t>(r);
}

} // namespace qmemdim
