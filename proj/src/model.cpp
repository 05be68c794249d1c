#include "powerbench/model.hpp"

#include <algorithm>
#include <cmath>

#include "powerbench/numeric.hpp"

namespace powerbench {

size_t ExperimentSet::success_count() const {
    return static_cast<size_t>(
        std::count_if(runs.begin(), runs.end(), [](const Run& r) { return r.success; }));
}

namespace {

bool same_grid(const TimeSeries& a, const TimeSeries& b) {
    return a.size() == b.size() &&
           std::equal(a.timestamps().begin(), a.timestamps().end(),
                      b.timestamps().begin());
}

// Joint channels must cover the same window as the power profile, give or
// take one sample period.
void check_span(const Run& run, const TimeSeries& channel, const std::string& what) {
    const double tol = std::max(run.power.median_dt(), channel.median_dt());
    if (std::abs(channel.start_time() - run.power.start_time()) > tol ||
        std::abs(channel.end_time() - run.power.end_time()) > tol) {
        throw ValidationError(
            "run '" + run.id + "': " + what + " spans [" +
            format_double(channel.start_time()) + ", " + format_double(channel.end_time()) +
            "] but power spans [" + format_double(run.power.start_time()) + ", " +
            format_double(run.power.end_time()) + "] (tolerance " + format_double(tol) + " s)");
    }
}

} // namespace

void validate(const JointTelemetry& joint) {
    const std::string tag = "joint " + std::to_string(joint.joint_index);
    if (joint.joint_index < 0) {
        throw ValidationError(tag + ": negative joint index");
    }
    if (!same_grid(joint.torque, joint.velocity)) {
        throw ValidationError(tag + ": torque and velocity timestamps differ");
    }
    if (joint.current_target.has_value() != joint.current_actual.has_value()) {
        throw ValidationError(tag + ": target/actual currents must be present together");
    }
    if (joint.current_target &&
        !same_grid(*joint.current_target, *joint.current_actual)) {
        throw ValidationError(tag + ": target and actual current timestamps differ");
    }
}

void validate(const RobotConstants& constants) {
    if (constants.electronics_power_w < 0) {
        throw ValidationError("constants: electronics power must be >= 0");
    }
    if (constants.brake_power_w < 0) {
        throw ValidationError("constants: brake power must be >= 0");
    }
    if (constants.joint_count < 1) {
        throw ValidationError("constants: joint count must be >= 1");
    }
}

void validate(const Run& run) {
    if (run.id.empty()) {
        throw ValidationError("run with empty id");
    }
    if (!(run.duration() > 0)) {
        throw ValidationError("run '" + run.id + "': non-positive duration");
    }
    for (const auto& joint : run.joints) {
        validate(joint);
        check_span(run, joint.torque, "joint " + std::to_string(joint.joint_index) +
                                          " torque/velocity");
        if (joint.current_target) {
            check_span(run, *joint.current_target,
                       "joint " + std::to_string(joint.joint_index) + " currents");
        }
    }
}

void validate(const ExperimentSet& set) {
    validate(set.constants);
    if (set.runs.empty()) {
        throw ValidationError("experiment set '" + set.program_id +
                              "': at least one run required");
    }
    for (const auto& run : set.runs) {
        validate(run);
        for (const auto& joint : run.joints) {
            if (joint.joint_index >= set.constants.joint_count) {
                throw ValidationError("run '" + run.id + "': joint index " +
                                      std::to_string(joint.joint_index) +
                                      " out of range for joint count " +
                                      std::to_string(set.constants.joint_count));
            }
        }
    }
}

} // namespace powerbench
