#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace oracle {

double binom(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    std::vector<std::vector<double>> tri(static_cast<size_t>(n) + 1);
    for (int r = 0; r <= n; ++r) {
        tri[static_cast<size_t>(r)].assign(static_cast<size_t>(r) + 1, 1.0);
        for (int j = 1; j < r; ++j) {
            tri[static_cast<size_t>(r)][static_cast<size_t>(j)] =
                tri[static_cast<size_t>(r) - 1][static_cast<size_t>(j) - 1] +
                tri[static_cast<size_t>(r) - 1][static_cast<size_t>(j)];
        }
    }
    return tri[static_cast<size_t>(n)][static_cast<size_t>(k)];
}

double binom_pmf(int n, int k, double p) {
    return binom(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

namespace {

void compose_rec(int remaining, int parts, std::vector<int>& prefix,
                 std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        prefix.push_back(v);
        compose_rec(remaining - v, parts - 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<std::vector<int>> compositions(int m, int parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    compose_rec(m, parts, prefix, out);
    return out;
}

namespace {

struct DenseBuilder {
    int m;
    int d;
    const std::vector<double>* probs;
    int c;
    const std::map<std::vector<int>, size_t>* index;
    std::vector<std::vector<double>>* matrix;

    void recurse(const std::vector<int>& state, size_t row, int level,
                 std::vector<int>& outcome, double prob) const {
        if (level == d) {
            std::vector<int> next(static_cast<size_t>(d) + 1, 0);
            for (int i = 1; i < d; ++i) {
                next[static_cast<size_t>(i)] = outcome[static_cast<size_t>(i) - 1] +
                                               state[static_cast<size_t>(i)] % 2;
            }
            if (d >= 1) {
                next[static_cast<size_t>(d)] =
                    std::max(outcome[static_cast<size_t>(d) - 1] +
                                 state[static_cast<size_t>(d)] - c,
                             0);
            }
            int rest = 0;
            for (int i = 1; i <= d; ++i) {
                rest += next[static_cast<size_t>(i)];
            }
            next[0] = m - rest;
            (*matrix)[row][index->at(next)] += prob;
            return;
        }
        const int attempts = state[static_cast<size_t>(level)] / 2;
        for (int k = 0; k <= attempts; ++k) {
            outcome[static_cast<size_t>(level)] = k;
            recurse(state, row, level + 1,
                    outcome, prob * binom_pmf(attempts, k, (*probs)[static_cast<size_t>(level)]));
        }
    }
};

} // namespace

std::vector<std::vector<double>> dense_transition_matrix(int m, int d,
                                                         const std::vector<double>& probs,
                                                         int c) {
    if (static_cast<int>(probs.size()) != d) {
        throw std::invalid_argument("oracle: probs must have length d");
    }
    const auto states = compositions(m, d + 1);
    std::map<std::vector<int>, size_t> index;
    for (size_t k = 0; k < states.size(); ++k) {
        index.emplace(states[k], k);
    }
    std::vector<std::vector<double>> matrix(
        states.size(), std::vector<double>(states.size(), 0.0));
    DenseBuilder builder{m, d, &probs, c, &index, &matrix};
    std::vector<int> outcome(static_cast<size_t>(std::max(d, 1)), 0);
    for (size_t row = 0; row < states.size(); ++row) {
        builder.recurse(states[row], row, 0, outcome, 1.0);
    }
    return matrix;
}

std::vector<double> dense_stationary(const std::vector<std::vector<double>>& p) {
    const size_t n = p.size();
    // Equations: sum_i v_i = 1 (row 0) and, for j >= 1, sum_i v_i P_ij = v_j.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (size_t j = 0; j < n; ++j) {
        a[0][j] = 1.0;
    }
    a[0][n] = 1.0;
    for (size_t j = 1; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) {
            a[j][i] = p[i][j] - (i == j ? 1.0 : 0.0);
        }
        a[j][n] = 0.0;
    }
    // Gaussian elimination with partial pivoting on the augmented system.
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (a[pivot][col] == 0.0) {
            throw std::runtime_error("oracle: singular stationary system");
        }
        std::swap(a[col], a[pivot]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0.0) {
                continue;
            }
            const double factor = a[r][col] / a[col][col];
            for (size_t j = col; j <= n; ++j) {
                a[r][j] -= factor * a[col][j];
            }
        }
    }
    std::vector<double> v(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        v[i] = a[i][n] / a[i][i];
    }
    return v;
}

} // namespace oracle
