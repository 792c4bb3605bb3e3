#include "qmemdim/binomial.hpp"

#include <sstream>

#include "qmemdim/errors.hpp"

namespace qmemdim {

BinomialPmf::BinomialPmf(int max_n, double p) : max_n_(max_n), p_(p) {
    if (max_n < 0) {
        throw ValidationError("binomial table size must be >= 0");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "binomial success probability " << p << " outside [0,1]";
        throw ValidationError(msg.str());
    }
    row_start_.resize(static_cast<std::size_t>(max_n_) + 2);
    std::size_t total = 0;
    for (int n = 0; n <= max_n_; ++n) {
        row_start_[static_cast<std::size_t>(n)] = total;
        total += static_cast<std::size_t>(n) + 1;
    }
    row_start_[static_cast<std::size_t>(max_n_) + 1] = total;
    values_.assign(total, 0.0);

    const double q = 1.0 - p;
    for (int n = 0; n <= max_n_; ++n) {
        double* out = values_.data() + row_start_[static_cast<std::size_t>(n)];
        if (p == 1.0) {
            out[n] = 1.0;
            continue;
        }
        if (p == 0.0) {
            out[0] = 1.0;
            continue;
        }
        // C(n,k) by the multiplicative recurrence; powers as running products.
        double qpow = 1.0;
        for (int i = 0; i < n; ++i) {
            qpow *= q;
        }
        const double ratio = p / q;
        double coef = 1.0;
        double ratio_pow = 1.0;
        out[0] = qpow;
        for (int k = 1; k <= n; ++k) {
            coef = coef * static_cast<double>(n - k + 1) / static_cast<double>(k);
            ratio_pow *= ratio;
            out[k] = coef * qpow * ratio_pow; // C(n,k) p^k q^(n-k)
        }
    }
}

std::span<const double> BinomialPmf::row(int n) const {
    if (n < 0 || n > max_n_) {
        std::ostringstream msg;
        msg << "binomial row " << n << " out of range [0," << max_n_ << "]";
        throw ValidationError(msg.str());
    }
    const std::size_t start = row_start_[static_cast<std::size_t>(n)];
    return {values_.data() + start, static_cast<std::size_t>(n) + 1};
}

} // namespace qmemdim
