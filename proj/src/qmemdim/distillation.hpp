#ifndef QMEMDIM_DISTILLATION_HPP
#define QMEMDIM_DISTILLATION_HPP

#include <vector>

namespace qmemdim {

// Bell-diagonal two-qubit mixed state. The coefficients are the weights of
// |Φ+>, |Ψ->, |Ψ+> and |Φ-> in that order; `a` is the fidelity with respect
// to |Φ+>. Coefficients must be in [0,1] and sum to 1 (tolerance 1e-12).
struct BellDiagonalState {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    double fidelity() const { return a; }
    double sum() const { return a + b + c + d; }

    // Throws ValidationError if any coefficient is outside [0,1] or the
    // normalization is violated.
    void validate() const;
};

// Werner state of fidelity f0: the three error components share (1-f0)/3.
// Throws ValidationError for f0 outside [0,1].
BellDiagonalState werner_state(double f0);

// Success probability of one DEJMPS round on two copies of `s`:
// N = (a+b)^2 + (c+d)^2. Always in [1/2, 1] for normalized states.
double dejmps_success_prob(const BellDiagonalState& s);

struct DejmpsStep {
    BellDiagonalState state; // post-distillation state (normalized)
    double success_prob;     // N of the input state
};

// One symmetric DEJMPS distillation step:
//   a' = (a^2 + b^2)/N,  b' = 2cd/N,  c' = (c^2 + d^2)/N,  d' = 2ab/N.
// Throws ValidationError on invalid input or N == 0.
DejmpsStep dejmps_step(const BellDiagonalState& s);

// Fidelity ladder F0..Fd obtained by iterating DEJMPS from an initial state,
// together with the per-level success probabilities p_{i->i+1}.
class DistillationLadder {
public:
    // Runs `max_steps` distillation steps starting from `initial`.
    DistillationLadder(const BellDiagonalState& initial, int max_steps);

    int max_steps() const { return static_cast<int>(success_probs_.size()); }

    // Level i state, i in [0, max_steps]; level 0 is the initial state.
    const BellDiagonalState& level(int i) const { return levels_.at(static_cast<size_t>(i)); }
    const std::vector<BellDiagonalState>& levels() const { return levels_; }

    double fidelity(int i) const { return level(i).a; }

    // p_{i->i+1}, i in [0, max_steps).
    double success_prob(int i) const { return success_probs_.at(static_cast<size_t>(i)); }
    const std::vector<double>& success_probs() const { return success_probs_; }

    // True if any step succeeds with probability exactly 1 (perfect input
    // states). The memory chain is then not guaranteed ergodic; callers
    // surface this as a warning.
    bool has_certain_step() const;

private:
    std::vector<BellDiagonalState> levels_;
    std::vector<double> success_probs_;
};

} // namespace qmemdim

#endif
