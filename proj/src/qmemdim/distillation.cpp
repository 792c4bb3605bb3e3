#include "qmemdim/distillation.hpp"

#include <cmath>
#include <sstream>

#include "qmemdim/errors.hpp"

namespace qmemdim {

namespace {
constexpr double kNormTol = 1e-12;
}

void BellDiagonalState::validate() const {
    for (double x : {a, b, c, d}) {
        if (!(x >= 0.0 && x <= 1.0)) {
            std::ostringstream msg;
            msg << "Bell-diagonal coefficient " << x << " outside [0,1]";
            throw ValidationError(msg.str());
        }
    }
    if (std::abs(sum() - 1.0) > kNormTol) {
        std::ostringstream msg;
        msg << "Bell-diagonal coefficients sum to " << sum() << ", expected 1";
        throw ValidationError(msg.str());
    }
}

BellDiagonalState werner_state(double f0) {
    if (!(f0 >= 0.0 && f0 <= 1.0)) {
        std::ostringstream msg;
        msg << "Werner fidelity " << f0 << " outside [0,1]";
        throw ValidationError(msg.str());
    }
    const double e = (1.0 - f0) / 3.0;
    return BellDiagonalState{f0, e, e, e};
}

double dejmps_success_prob(const BellDiagonalState& s) {
    const double ab = s.a + s.b;
    const double cd = s.c + s.d;
    return ab * ab + cd * cd;
}

DejmpsStep dejmps_step(const BellDiagonalState& s) {
    s.validate();
    const double n = dejmps_success_prob(s);
    // For normalized inputs N >= 1/2 by convexity; guard regardless.
    if (n <= 0.0) {
        throw ValidationError("degenerate Bell-diagonal state: zero success probability");
    }
    BellDiagonalState out{
        (s.a * s.a + s.b * s.b) / n,
        2.0 * s.c * s.d / n,
        (s.c * s.c + s.d * s.d) / n,
        2.0 * s.a * s.b / n,
    };
    return DejmpsStep{out, n};
}

DistillationLadder::DistillationLadder(const BellDiagonalState& initial, int max_steps) {
    if (max_steps < 0) {
        throw ValidationError("distillation step count must be >= 0");
    }
    initial.validate();
    levels_.reserve(static_cast<size_t>(max_steps) + 1);
    success_probs_.reserve(static_cast<size_t>(max_steps));
    levels_.push_back(initial);
    for (int i = 0; i < max_steps; ++i) {
        DejmpsStep step = dejmps_step(levels_.back());
        levels_.push_back(step.state);
        success_probs_.push_back(step.success_prob);
    }
}

bool DistillationLadder::has_certain_step() const {
    for (double p : success_probs_) {
        if (p >= 1.0) {
            return true;
        }
    }
    return false;
}

} // namespace qmemdim
