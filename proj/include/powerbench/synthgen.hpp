#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "powerbench/ingest.hpp"
#include "powerbench/model.hpp"
#include "powerbench/wear.hpp"

namespace powerbench {

/// Trapezoidal power pulse: ramps over the first and last quarter of
/// `width_s`, plateau in between. Knots are snapped to the sample grid so
/// trapezoidal integration reproduces the analytic area exactly.
struct MotionBump {
    double start_s = 0.0;
    double width_s = 0.0;
    double peak_w = 0.0;
};

enum class FailureMode {
    Spike,      // collision / protective stop: adds a power rectangle
    Dropout,    // failed pick: motion bumps (and joint motion) zeroed
    Truncation, // aborted run: recording ends early
};

struct FailureSpec {
    int run_index = 0;
    FailureMode mode = FailureMode::Spike;
    // spike parameters
    double start_s = 0.0;
    double width_s = 1.0;
    double peak_w = 300.0;
    // truncation parameter
    double at_s = 0.0;
};

/// Joint telemetry generation knobs. Velocity follows the motion bumps
/// (positive pulse plus a clipped negative return swing); torque is held
/// constant per joint, so mechanical power stays piecewise linear and the
/// analytic positive mechanical energy is exact.
struct TelemetryConfig {
    int joint_count = 6;
    double base_torque_nm = 1.5;       // joint j gets base + step*j
    double torque_step_nm = 0.4;
    double base_velocity_rad_s = 0.8;  // pulse peak for joint j
    double velocity_step_rad_s = 0.1;
    double return_swing_scale = 0.6;   // negative swing, clipped out of E_MP
    double current_offset_a = 0.5;     // i_target = offset + slope*|vel|
    double current_slope_a = 0.9;
    double tracking_error_a = 0.02;    // nominal |target-actual| during motion
    double failure_current_error_a = 0.8; // extra deviation during spikes
    double base_temperature_c = 32.0;
    double temperature_step_c = 0.5;
};

struct ScenarioSpec {
    std::string program_id = "synthetic";
    std::string condition_id = "default";
    int n_runs = 10;
    double duration_s = 30.0;
    double dt_s = 0.05;
    double baseline_w = 98.26;
    std::vector<MotionBump> bumps;
    double noise_std_w = 0.0;
    std::vector<FailureSpec> failures;
    std::uint64_t seed = 0;
    std::optional<TelemetryConfig> telemetry;
    RobotConstants constants{.electronics_power_w = 91.14,
                             .brake_power_w = 7.12,
                             .joint_count = 6};
};

/// Throws ValidationError on out-of-range bumps/failures.
void validate(const ScenarioSpec& spec);

/// Exact pre-noise integrals, captured before noise injection.
struct RunGroundTruth {
    std::string id;
    double actual_energy_j = 0.0;        // closed-form bump + baseline area
    double positive_mech_energy_j = 0.0; // closed-form positive pulse work
    double duration_s = 0.0;
    bool success = true;
};

struct GeneratedExperiment {
    ExperimentSet set;
    std::optional<WearParams> wear;
    std::vector<RunGroundTruth> truth;
};

/// Deterministic for a fixed seed.
GeneratedExperiment generate(const ScenarioSpec& spec);

/// Writes power/telemetry CSVs, the manifest, and a ground_truth.json
/// sidecar into `out_dir` (created if missing). Returns the manifest path.
std::filesystem::path write_experiment(const GeneratedExperiment& experiment,
                                       const std::filesystem::path& out_dir);

/// Scenario JSON (same field names as ScenarioSpec).
ScenarioSpec load_scenario(const std::filesystem::path& path);

} // namespace powerbench
