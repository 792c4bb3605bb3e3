#ifndef QMEMDIM_BINOMIAL_HPP
#define QMEMDIM_BINOMIAL_HPP

#include <span>
#include <vector>

namespace qmemdim {

// Precomputed binomial pmf table B(n,k,p) = C(n,k) p^k (1-p)^(n-k) for all
// n in [0, max_n], k in [0, n]. Coefficients use the multiplicative
// recurrence in double precision; for n <= 70 the relative error stays
// below ~1e-13.
class BinomialPmf {
public:
    BinomialPmf(int max_n, double p);

    double p() const { return p_; }
    int max_n() const { return max_n_; }

    // Row of pmf values for a fixed trial count n (length n+1).
    std::span<const double> row(int n) const;

    double operator()(int n, int k) const { return row(n)[static_cast<std::size_t>(k)]; }

private:
    int max_n_;
    double p_;
    std::vector<double> values_;           // triangular, rows concatenated
    std::vector<std::size_t> row_start_;   // max_n_+2 offsets
};

} // namespace qmemdim

#endif
