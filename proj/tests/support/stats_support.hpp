#ifndef HETVOL_TESTS_STATS_SUPPORT_HPP
#define HETVOL_TESTS_STATS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

namespace testsupport {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov-Smirnov statistic against the standard normal
inline double ks_statistic_normal(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = normal_cdf(x[i]);
        d = std::max(d, std::abs(F - double(i) / n));
        d = std::max(d, std::abs(F - double(i + 1) / n));
    }
    return d;
}

// asymptotic critical value at level alpha: K_alpha / sqrt(n)
inline double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(double(n));
}

} // namespace testsupport

#endif
