#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "powerbench/time_series.hpp"

namespace powerbench {

/// Internal sensor channels for one joint. Torque/velocity always share a
/// timestamp grid; the optional current pair shares its own grid.
struct JointTelemetry {
    int joint_index = 0;
    TimeSeries torque;   // N*m
    TimeSeries velocity; // rad/s
    std::optional<TimeSeries> current_target; // A
    std::optional<TimeSeries> current_actual; // A
    std::optional<TimeSeries> temperature;    // degC
};

/// Robot-level calibration constants. delta_* terms are user-supplied
/// (kinematic computation is out of scope); both default to zero.
struct RobotConstants {
    double electronics_power_w = 0.0; // idle control/sensing/comms draw
    double brake_power_w = 0.0;       // holding power of released brakes
    int joint_count = 6;
    double delta_potential_j = 0.0;
    double delta_kinetic_j = 0.0;
};

/// One program execution. Timestamps are start-aligned at ingest so every
/// run begins at t = 0.
struct Run {
    std::string id;
    TimeSeries power; // W
    std::vector<JointTelemetry> joints; // empty when telemetry is absent
    bool success = true;
    std::map<std::string, std::string> metadata;

    double duration() const { return power.duration(); }
    bool has_telemetry() const { return !joints.empty(); }
};

/// n repetitions of one program under one condition.
struct ExperimentSet {
    std::string program_id;
    std::string condition_id;
    std::vector<Run> runs;
    RobotConstants constants;

    size_t run_count() const { return runs.size(); }
    size_t success_count() const;
};

/// Invariant checks, throwing ValidationError on the first violation.
void validate(const JointTelemetry& joint);
void validate(const RobotConstants& constants);
void validate(const Run& run);
void validate(const ExperimentSet& set);

} // namespace powerbench
