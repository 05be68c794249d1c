#pragma once

#include <span>
#include <vector>

#include "powerbench/errors.hpp"

namespace powerbench {

/// Uniformly or non-uniformly sampled scalar signal. Timestamps are seconds,
/// strictly increasing; value units depend on the channel (W, N*m, rad/s,
/// A, degC). Immutable after construction.
class TimeSeries {
public:
    /// Throws ValidationError unless both sequences have equal length >= 2
    /// and timestamps are strictly increasing and finite.
    TimeSeries(std::vector<double> timestamps, std::vector<double> values);

    std::span<const double> timestamps() const { return timestamps_; }
    std::span<const double> values() const { return values_; }

    size_t size() const { return values_.size(); }
    double start_time() const { return timestamps_.front(); }
    double end_time() const { return timestamps_.back(); }
    double duration() const { return timestamps_.back() - timestamps_.front(); }

    /// Linear interpolation at time t; exact at sample points.
    /// Throws DomainError when t lies outside [start_time, end_time].
    double value_at(double t) const;

    /// Like value_at but holds the edge values outside the domain.
    double value_at_clamped(double t) const;

    /// Median inter-sample interval.
    double median_dt() const;

    bool operator==(const TimeSeries& other) const = default;

private:
    std::vector<double> timestamps_;
    std::vector<double> values_;
};

/// Linear interpolation of a series onto a new grid. The grid must be
/// strictly increasing and contained in the series' time domain.
TimeSeries resample(const TimeSeries& series, std::span<const double> grid);

/// Trapezoidal integral over the full domain; exact for piecewise-linear
/// signals with knots on the sample points. Units: value-units * s.
double integrate(const TimeSeries& series);

/// max(values) - min(values).
double signal_range(const TimeSeries& series);

} // namespace powerbench
