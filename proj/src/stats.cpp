#include "powerbench/stats.hpp"

#include <algorithm>
#include <cmath>

#include "powerbench/numeric.hpp"
#include "powerbench/time_series.hpp"

namespace powerbench {

namespace {

// Continued-fraction evaluation of the regularized incomplete beta
// I_x(a, b), modified Lentz scheme.
double incomplete_beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * incomplete_beta_cf(a, b, x) / a;
    }
    return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

// Two-sided tail probability of |T| >= |t| for T ~ Student-t(dof).
double two_sided_p(double t, int dof) {
    const double nu = dof;
    const double x = nu / (nu + t * t);
    return incomplete_beta(0.5 * nu, 0.5, x);
}

} // namespace

double student_t_cdf(double t, int dof) {
    if (dof < 1) throw DomainError("t distribution needs dof >= 1");
    const double p = 0.5 * two_sided_p(t, dof);
    return t >= 0 ? 1.0 - p : p;
}

double student_t_critical(double level, int dof) {
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("confidence level must lie in (0, 1), got " +
                          format_double(level));
    }
    if (dof < 1) throw DomainError("t distribution needs dof >= 1");
    const double tail = 0.5 * (1.0 - level);

    // two_sided_p is strictly decreasing in t; bracket then bisect.
    double lo = 0.0;
    double hi = 1.0;
    while (two_sided_p(hi, dof) > 2.0 * tail) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (two_sided_p(mid, dof) > 2.0 * tail) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("paired t-test: sample lengths differ (" +
                              std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) {
        throw ValidationError("paired t-test: need at least 2 pairs");
    }
    const size_t n = a.size();
    std::vector<double> diff(n);
    for (size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

    const double mean = neumaier_sum(diff) / static_cast<double>(n);
    const double sd = sample_std(diff, mean);
    if (sd == 0.0) {
        throw DomainError("degenerate pairing: differences have zero variance");
    }

    TTestResult r;
    r.degrees_of_freedom = static_cast<int>(n) - 1;
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = two_sided_p(r.t_statistic, r.degrees_of_freedom);
    r.significant_at_0_05 = r.p_value < 0.05;
    return r;
}

BandProfile confidence_band(const ExperimentSet& set, std::span<const double> grid,
                            double level) {
    if (set.runs.size() < 2) {
        throw DomainError("confidence band needs at least 2 runs");
    }
    std::vector<TimeSeries> resampled;
    resampled.reserve(set.runs.size());
    for (const auto& run : set.runs) {
        resampled.push_back(resample(run.power, grid));
    }
    const double n = static_cast<double>(set.runs.size());
    const double t_crit = student_t_critical(level, static_cast<int>(n) - 1);

    BandProfile band;
    band.level = level;
    band.grid.assign(grid.begin(), grid.end());
    band.mean.resize(grid.size());
    band.lower.resize(grid.size());
    band.upper.resize(grid.size());
    std::vector<double> column(resampled.size());
    for (size_t g = 0; g < grid.size(); ++g) {
        for (size_t r = 0; r < resampled.size(); ++r) {
            column[r] = resampled[r].values()[g];
        }
        const double mean = sorted_mean(column);
        const double half = t_crit * sample_std(column, mean) / std::sqrt(n);
        band.mean[g] = mean;
        band.lower[g] = mean - half;
        band.upper[g] = mean + half;
    }
    return band;
}

Matrix power_heatmap(const ExperimentSet& set, std::span<const double> grid) {
    Matrix m;
    m.rows = set.runs.size();
    m.cols = grid.size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& run : set.runs) {
        const TimeSeries row = resample(run.power, grid);
        m.data.insert(m.data.end(), row.values().begin(), row.values().end());
    }
    return m;
}

Matrix alpha_heatmap(const WearResult& wear, std::span<const double> grid) {
    if (wear.alpha.empty()) {
        throw DomainError("alpha heatmap: wear result holds no runs");
    }
    Matrix m;
    m.rows = wear.alpha.size();
    m.cols = grid.size();
    m.data.assign(m.rows * m.cols, 0.0);
    for (size_t r = 0; r < wear.alpha.size(); ++r) {
        for (const auto& series : wear.alpha[r]) {
            for (size_t g = 0; g < grid.size(); ++g) {
                m.at(r, g) += series.value_at_clamped(grid[g]);
            }
        }
    }
    return m;
}

} // namespace powerbench
