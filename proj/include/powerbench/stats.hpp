#pragma once

#include <span>
#include <vector>

#include "powerbench/model.hpp"
#include "powerbench/wear.hpp"

namespace powerbench {

struct TTestResult {
    double t_statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    bool significant_at_0_05 = false;
};

/// Pointwise mean with a symmetric Student-t confidence band.
struct BandProfile {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.95;
};

/// Dense run-by-grid matrix for heatmap plotting; row order follows the
/// manifest order of the runs.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data; // row-major

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

/// Two-sided paired t-test on index-paired samples. The p-value is
/// evaluated through the regularized incomplete beta function.
/// Throws DomainError("degenerate pairing") when the differences have zero
/// variance, and ValidationError on length mismatch or n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Student-t CDF and its inverse (upper critical value for a two-sided
/// interval at `level`). Critical values are computed numerically, so any
/// sample size works.
double student_t_cdf(double t, int dof);
double student_t_critical(double level, int dof);

/// mean(t) +/- t_crit(level, n-1) * sigma(t) / sqrt(n) over every run's
/// power resampled on `grid`. Requires n >= 2.
BandProfile confidence_band(const ExperimentSet& set, std::span<const double> grid,
                            double level = 0.95);

/// Power heatmap: row i = run i's power resampled on `grid`.
Matrix power_heatmap(const ExperimentSet& set, std::span<const double> grid);

/// Stress heatmap: row i = run i's per-joint stress summed over joints,
/// sampled on `grid` with edge clamping (telemetry windows may fall just
/// short of the power window).
Matrix alpha_heatmap(const WearResult& wear, std::span<const double> grid);

} // namespace powerbench
