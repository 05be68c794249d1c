#include "powerbench/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "powerbench/numeric.hpp"

namespace powerbench {

namespace {

void warn(Warnings* sink, const std::string& msg) {
    if (sink) sink->push_back(msg);
}

void require_same_grid(const TimeSeries& a, const TimeSeries& b) {
    if (a.size() != b.size() ||
        !std::equal(a.timestamps().begin(), a.timestamps().end(),
                    b.timestamps().begin())) {
        throw ValidationError("series are not on the same grid");
    }
}

// Mean of the squared residual, time-weighted by trapezoidal integration.
double mean_square_residual(const TimeSeries& a, const TimeSeries& b) {
    const auto ts = a.timestamps();
    const auto va = a.values();
    const auto vb = b.values();
    std::vector<double> terms;
    terms.reserve(ts.size() - 1);
    auto sq = [&](size_t i) {
        const double d = va[i] - vb[i];
        return d * d;
    };
    for (size_t i = 1; i < ts.size(); ++i) {
        terms.push_back((ts[i] - ts[i - 1]) * 0.5 * (sq(i) + sq(i - 1)));
    }
    const double span = ts.back() - ts.front();
    return neumaier_sum(terms) / span;
}

} // namespace

std::vector<double> common_grid(const ExperimentSet& set,
                                std::optional<double> dt_override) {
    if (set.runs.empty()) {
        throw ValidationError("common grid: experiment set has no runs");
    }
    double step;
    if (dt_override) {
        step = *dt_override;
        if (!(step > 0)) {
            throw DomainError("common grid: step must be positive, got " +
                              format_double(step));
        }
    } else {
        std::vector<double> medians;
        medians.reserve(set.runs.size());
        for (const auto& run : set.runs) {
            medians.push_back(run.power.median_dt());
        }
        step = median(std::move(medians));
    }

    double t_min = std::numeric_limits<double>::infinity();
    for (const auto& run : set.runs) {
        t_min = std::min(t_min, run.power.duration());
    }

    // Snap the step count down to the shared window, tolerating one part
    // in 1e12 of float drift on the last point.
    const auto steps = static_cast<size_t>(std::floor(t_min / step * (1.0 + 1e-12)));
    if (steps < 2) {
        throw DomainError("common grid: shortest run (" + format_double(t_min) +
                          " s) is under two grid steps of " + format_double(step) +
                          " s");
    }
    std::vector<double> grid;
    grid.reserve(steps + 1);
    for (size_t i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) * step;
        if (t > t_min) t = t_min; // float guard on the final point
        grid.push_back(t);
    }
    return grid;
}

TimeSeries mean_successful_profile(const ExperimentSet& set,
                                   std::span<const double> grid) {
    std::vector<TimeSeries> succ;
    for (const auto& run : set.runs) {
        if (run.success) succ.push_back(resample(run.power, grid));
    }
    if (succ.empty()) {
        throw DomainError("no successful runs; the mean profile is undefined");
    }
    std::vector<double> mean_vals(grid.size());
    std::vector<double> column(succ.size());
    for (size_t g = 0; g < grid.size(); ++g) {
        for (size_t r = 0; r < succ.size(); ++r) {
            column[r] = succ[r].values()[g];
        }
        mean_vals[g] = sorted_mean(column);
    }
    return TimeSeries(std::vector<double>(grid.begin(), grid.end()),
                      std::move(mean_vals));
}

double nrmse_coefficient(const TimeSeries& run_resampled,
                         const TimeSeries& mean_profile, Warnings* warnings) {
    require_same_grid(run_resampled, mean_profile);
    const double range = signal_range(run_resampled);
    if (!(range > 0)) {
        throw DomainError("constant profile: NRMSE undefined (zero range)");
    }
    const double eps = std::sqrt(mean_square_residual(run_resampled, mean_profile)) / range;
    double c1 = 1.0 - eps;
    if (c1 < 0.0) {
        warn(warnings, "NRMSE " + format_double(eps) +
                           " exceeds 1; c1 clamped to 0 (pathological divergence)");
        c1 = 0.0;
    }
    return c1;
}

double variation_coefficient(const std::vector<TimeSeries>& runs_resampled,
                             const TimeSeries& mean_profile, double cv_floor_w,
                             Warnings* warnings) {
    if (runs_resampled.size() < 2) {
        throw DomainError("coefficient of variation needs at least 2 runs");
    }
    for (const auto& run : runs_resampled) {
        require_same_grid(run, mean_profile);
    }
    const auto ts = mean_profile.timestamps();
    const auto mean_vals = mean_profile.values();
    const size_t n_runs = runs_resampled.size();

    std::vector<double> cv(ts.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> column(n_runs);
    size_t excluded = 0;
    for (size_t g = 0; g < ts.size(); ++g) {
        if (std::abs(mean_vals[g]) < cv_floor_w) {
            ++excluded;
            continue;
        }
        for (size_t r = 0; r < n_runs; ++r) {
            column[r] = runs_resampled[r].values()[g];
        }
        const double sigma = sample_std(column, sorted_mean(column));
        cv[g] = sigma / mean_vals[g];
    }
    if (excluded > 0) {
        warn(warnings, std::to_string(excluded) +
                           " grid point(s) excluded from cv: |mean profile| below " +
                           format_double(cv_floor_w) + " W");
    }

    // Integrate over intervals whose both endpoints are valid; average over
    // the time actually covered.
    std::vector<double> terms;
    std::vector<double> spans;
    terms.reserve(ts.size());
    spans.reserve(ts.size());
    for (size_t i = 1; i < ts.size(); ++i) {
        if (std::isnan(cv[i - 1]) || std::isnan(cv[i])) continue;
        const double dt = ts[i] - ts[i - 1];
        terms.push_back(dt * 0.5 * (cv[i] + cv[i - 1]));
        spans.push_back(dt);
    }
    if (spans.empty()) {
        throw DomainError("coefficient of variation: no grid interval has a "
                          "mean profile above the floor");
    }
    const double avg_cv = neumaier_sum(terms) / neumaier_sum(spans);
    double c2 = 1.0 - avg_cv;
    if (c2 < 0.0) {
        warn(warnings, "time-averaged cv " + format_double(avg_cv) +
                           " exceeds 1; c2 clamped to 0");
        c2 = 0.0;
    } else if (c2 > 1.0) {
        warn(warnings, "negative time-averaged cv " + format_double(avg_cv) +
                           "; c2 clamped to 1");
        c2 = 1.0;
    }
    return c2;
}

double correlation_coefficient(const TimeSeries& run_resampled,
                               const TimeSeries& mean_profile) {
    require_same_grid(run_resampled, mean_profile);
    const auto xs = run_resampled.values();
    const auto ys = mean_profile.values();
    const size_t n = xs.size();

    const double mean_x = sorted_mean({xs.begin(), xs.end()});
    const double mean_y = sorted_mean({ys.begin(), ys.end()});
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DomainError("correlation undefined for constant signal");
    }
    // Collinear signals must land exactly on +/-1.
    if (sxy * sxy == sxx * syy) {
        return sxy >= 0 ? 1.0 : -1.0;
    }
    const double rho = sxy / std::sqrt(sxx * syy);
    return std::clamp(rho, -1.0, 1.0);
}

double reliability_coefficient(double c1_mean, double c2, double c3_mean,
                               const ReliabilityWeights& weights) {
    if (weights.w1 < 0 || weights.w2 < 0 || weights.w3 < 0) {
        throw DomainError("reliability weights must be non-negative");
    }
    const double total = weights.w1 + weights.w2 + weights.w3;
    if (!(total > 0)) {
        throw DomainError("reliability weights must not all be zero");
    }
    return (weights.w1 * c1_mean + weights.w2 * c2 + weights.w3 * std::abs(c3_mean)) /
           total;
}

ReliabilityResult evaluate_reliability(const ExperimentSet& set,
                                       const ReliabilityWeights& weights,
                                       const ReliabilityOptions& options) {
    validate(set);
    Warnings warnings;
    std::vector<double> grid = common_grid(set, options.grid_dt);
    const double grid_dt = grid[1] - grid[0];

    std::vector<TimeSeries> resampled;
    std::vector<double> dropped;
    resampled.reserve(set.runs.size());
    for (const auto& run : set.runs) {
        resampled.push_back(resample(run.power, grid));
        dropped.push_back(run.duration() - grid.back());
    }
    const double max_dropped = *std::max_element(dropped.begin(), dropped.end());
    if (max_dropped > grid_dt) {
        warnings.push_back("runs truncated to the shortest duration (" +
                           format_double(grid.back()) + " s); up to " +
                           format_double(max_dropped) + " s dropped");
    }

    TimeSeries mean_profile = mean_successful_profile(set, grid);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> c1_per_run, c3_per_run;
    std::vector<double> c1_included, c3_included;
    for (size_t i = 0; i < set.runs.size(); ++i) {
        const bool included = options.include_failed_in_c13 || set.runs[i].success;
        if (!included) {
            c1_per_run.push_back(nan);
            c3_per_run.push_back(nan);
            continue;
        }
        Warnings w;
        const double c1 = nrmse_coefficient(resampled[i], mean_profile, &w);
        const double c3 = correlation_coefficient(resampled[i], mean_profile);
        for (auto& msg : w) {
            warnings.push_back("run '" + set.runs[i].id + "': " + msg);
        }
        c1_per_run.push_back(c1);
        c3_per_run.push_back(c3);
        c1_included.push_back(c1);
        c3_included.push_back(c3);
    }

    const double c1_mean = sorted_mean(std::move(c1_included));
    const double c3_mean = sorted_mean(std::move(c3_included));
    const double c2 =
        variation_coefficient(resampled, mean_profile, options.cv_floor_w, &warnings);
    const double f_r = reliability_coefficient(c1_mean, c2, c3_mean, weights);

    return ReliabilityResult{
        .c1_per_run = std::move(c1_per_run),
        .c3_per_run = std::move(c3_per_run),
        .c1_mean = c1_mean,
        .c2 = c2,
        .c3_mean = c3_mean,
        .reliability = f_r,
        .mean_profile = std::move(mean_profile),
        .grid = std::move(grid),
        .grid_dt = grid_dt,
        .dropped_seconds_per_run = std::move(dropped),
        .warnings = std::move(warnings),
    };
}

} // namespace powerbench
