#pragma once

#include <optional>

#include "powerbench/model.hpp"

namespace powerbench {

/// Weights of the c1/c2/|c3| aggregate. All non-negative, sum positive.
struct ReliabilityWeights {
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 1.0;
};

struct ReliabilityOptions {
    /// When true (default) the c1/c3 averages include failed runs, so a
    /// program that keeps failing cannot look reliable. The alternative
    /// (successful runs only) is exposed because the choice is a judgement
    /// call; both compare every run against the successful-mean profile.
    bool include_failed_in_c13 = true;
    /// Grid points where |mean profile| falls below this are excluded from
    /// the cv integral and counted in a warning.
    double cv_floor_w = 1e-6;
    /// Overrides the median-of-medians grid step.
    std::optional<double> grid_dt;
};

struct ReliabilityResult {
    /// Per-run values aligned with set.runs; NaN where a run was excluded
    /// from the c1/c3 averages.
    std::vector<double> c1_per_run;
    std::vector<double> c3_per_run;
    double c1_mean = 0.0;
    double c2 = 0.0;
    double c3_mean = 0.0;
    double reliability = 0.0; // f_R in [0, 1]
    TimeSeries mean_profile;  // successful-run mean on the common grid
    std::vector<double> grid;
    double grid_dt = 0.0;
    /// Tail seconds dropped per run by truncation to the shortest run.
    std::vector<double> dropped_seconds_per_run;
    Warnings warnings;
};

/// Shared evaluation grid: uniform step = median of the runs' median sample
/// intervals (or dt_override), spanning [0, shortest run duration].
/// Throws DomainError when fewer than two grid steps fit.
std::vector<double> common_grid(const ExperimentSet& set,
                                std::optional<double> dt_override = std::nullopt);

/// Pointwise mean of the successful runs resampled on `grid`.
/// Throws DomainError("no successful runs") when every run failed.
TimeSeries mean_successful_profile(const ExperimentSet& set,
                                   std::span<const double> grid);

/// c1 = 1 - eps, clamped to [0, 1], where eps is the RMS deviation from the
/// mean profile normalized by the run's own range. Both series must share
/// the grid. Throws DomainError for a constant (zero-range) run.
double nrmse_coefficient(const TimeSeries& run_resampled,
                         const TimeSeries& mean_profile,
                         Warnings* warnings = nullptr);

/// c2 = 1 - time-averaged cv(t), clamped to [0, 1]; cv(t) is the cross-run
/// sample standard deviation over the successful-mean profile. All runs
/// participate. Requires n >= 2.
double variation_coefficient(const std::vector<TimeSeries>& runs_resampled,
                             const TimeSeries& mean_profile,
                             double cv_floor_w = 1e-6,
                             Warnings* warnings = nullptr);

/// c3: Pearson correlation between a run and the mean profile over the grid
/// samples. Throws DomainError when either signal is constant.
double correlation_coefficient(const TimeSeries& run_resampled,
                               const TimeSeries& mean_profile);

/// f_R = (w1 c1 + w2 c2 + w3 |c3|) / (w1 + w2 + w3).
double reliability_coefficient(double c1_mean, double c2, double c3_mean,
                               const ReliabilityWeights& weights);

/// Full pipeline: grid, resampling, per-run c1/c3, c2, f_R.
ReliabilityResult evaluate_reliability(const ExperimentSet& set,
                                       const ReliabilityWeights& weights = {},
                                       const ReliabilityOptions& options = {});

} // namespace powerbench
