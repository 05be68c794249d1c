#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace powerbench {

/// Neumaier-compensated sum. Keeps trapezoidal integrals and long
/// accumulations near one-ulp accuracy.
inline double neumaier_sum(std::span<const double> xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

/// Order-canonical sum: sorts ascending before accumulating, so the result
/// depends only on the multiset of values. Cross-run reductions use this to
/// stay bit-identical under run permutation.
inline double sorted_sum(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return neumaier_sum(xs);
}

/// Order-canonical mean. Exact when all inputs are equal (identical runs
/// must average to themselves bit-for-bit).
inline double sorted_mean(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    if (xs.front() == xs.back()) return xs.front();
    return neumaier_sum(xs) / static_cast<double>(xs.size());
}

/// Median with the average-of-middle-two convention for even counts.
inline double median(std::vector<double> xs) {
    const size_t n = xs.size();
    std::sort(xs.begin(), xs.end());
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Cross-sample standard deviation with the n-1 denominator.
/// Exactly zero when every value equals the mean.
inline double sample_std(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    std::vector<double> sq;
    sq.reserve(xs.size());
    for (double x : xs) {
        const double d = x - mean;
        sq.push_back(d * d);
    }
    const double ss = sorted_sum(std::move(sq));
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Fixed 17-significant-digit rendering; round-trips doubles bit-exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace powerbench
