#pragma once

// Independent reference implementations used only by tests. They follow the
// textbook definitions directly and share no code with the library.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace wordnorms::testing {

inline bool all_equal(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] != v[0]) return false;
    }
    return true;
}

/// Sample covariance over the product of sample standard deviations.
inline std::optional<double> oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || all_equal(x) || all_equal(y)) return std::nullopt;
    double sum_x = 0.0;
    double sum_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_x += x[i];
        sum_y += y[i];
    }
    const double mean_x = sum_x / static_cast<double>(n);
    const double mean_y = sum_y / static_cast<double>(n);
    double cov = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (x[i] - mean_x) * (y[i] - mean_y);
        var_x += (x[i] - mean_x) * (x[i] - mean_x);
        var_y += (y[i] - mean_y) * (y[i] - mean_y);
    }
    const double denom = static_cast<double>(n - 1);
    return (cov / denom) / (std::sqrt(var_x / denom) * std::sqrt(var_y / denom));
}

/// O(n^2) ranks: 1 + number of smaller values + half the number of other equal values.
inline std::vector<double> oracle_ranks(const std::vector<double>& v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0.0;
        double equal = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) less += 1.0;
            if (v[j] == v[i]) equal += 1.0;
        }
        ranks[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return ranks;
}

inline std::optional<double> oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return oracle_pearson(oracle_ranks(x), oracle_ranks(y));
}

}  // namespace wordnorms::testing
