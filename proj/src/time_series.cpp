#include "powerbench/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "powerbench/numeric.hpp"

namespace powerbench {

TimeSeries::TimeSeries(std::vector<double> timestamps, std::vector<double> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
    if (timestamps_.size() != values_.size()) {
        throw ValidationError("time series: timestamp/value length mismatch (" +
                              std::to_string(timestamps_.size()) + " vs " +
                              std::to_string(values_.size()) + ")");
    }
    if (timestamps_.size() < 2) {
        throw ValidationError("time series: need at least 2 samples, got " +
                              std::to_string(timestamps_.size()));
    }
    for (size_t i = 0; i < timestamps_.size(); ++i) {
        if (!std::isfinite(timestamps_[i]) || !std::isfinite(values_[i])) {
            throw ValidationError("time series: non-finite entry at index " +
                                  std::to_string(i));
        }
        if (i > 0 && timestamps_[i] <= timestamps_[i - 1]) {
            throw ValidationError(
                "time series: timestamps not strictly increasing at index " +
                std::to_string(i) + " (" + format_double(timestamps_[i - 1]) +
                " -> " + format_double(timestamps_[i]) + ")");
        }
    }
}

namespace {

// Index of the interval [t_i, t_{i+1}] containing t; assumes t in domain.
size_t interval_index(std::span<const double> ts, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    size_t idx = static_cast<size_t>(it - ts.begin());
    if (idx == 0) return 0;
    if (idx >= ts.size()) return ts.size() - 2;
    return idx - 1;
}

double interp_in(const TimeSeries& s, double t) {
    const auto ts = s.timestamps();
    const auto vs = s.values();
    const size_t i = interval_index(ts, t);
    if (t == ts[i]) return vs[i];
    if (t == ts[i + 1]) return vs[i + 1];
    const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    return vs[i] + w * (vs[i + 1] - vs[i]);
}

} // namespace

double TimeSeries::value_at(double t) const {
    if (t < start_time() || t > end_time()) {
        throw DomainError("time " + format_double(t) + " outside series domain [" +
                          format_double(start_time()) + ", " +
                          format_double(end_time()) + "]");
    }
    return interp_in(*this, t);
}

double TimeSeries::value_at_clamped(double t) const {
    if (t <= start_time()) return values_.front();
    if (t >= end_time()) return values_.back();
    return interp_in(*this, t);
}

double TimeSeries::median_dt() const {
    std::vector<double> dts;
    dts.reserve(size() - 1);
    for (size_t i = 1; i < size(); ++i) {
        dts.push_back(timestamps_[i] - timestamps_[i - 1]);
    }
    return median(std::move(dts));
}

TimeSeries resample(const TimeSeries& series, std::span<const double> grid) {
    if (grid.size() < 2) {
        throw ValidationError("resample: grid needs at least 2 points");
    }
    std::vector<double> ts(grid.begin(), grid.end());
    std::vector<double> vs;
    vs.reserve(grid.size());
    for (double t : grid) {
        vs.push_back(series.value_at(t));
    }
    return TimeSeries(std::move(ts), std::move(vs));
}

double integrate(const TimeSeries& series) {
    const auto ts = series.timestamps();
    const auto vs = series.values();
    std::vector<double> terms;
    terms.reserve(ts.size() - 1);
    for (size_t i = 1; i < ts.size(); ++i) {
        terms.push_back((ts[i] - ts[i - 1]) * 0.5 * (vs[i] + vs[i - 1]));
    }
    return neumaier_sum(terms);
}

double signal_range(const TimeSeries& series) {
    const auto [lo, hi] =
        std::minmax_element(series.values().begin(), series.values().end());
    return *hi - *lo;
}

} // namespace powerbench
