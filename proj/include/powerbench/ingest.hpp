#pragma once

#include <filesystem>
#include <optional>

#include "powerbench/model.hpp"
#include "powerbench/wear.hpp"

namespace powerbench {

/// One run entry of a manifest.
struct ManifestRun {
    std::string id;
    std::filesystem::path power_file;
    std::optional<std::filesystem::path> telemetry_file;
    bool success = true;
};

/// Parsed experiment manifest. Paths are resolved relative to the manifest
/// file's directory.
struct ExperimentManifest {
    std::string program_id;
    std::string condition_id;
    RobotConstants constants;
    std::optional<WearParams> wear;
    std::vector<ManifestRun> runs;
};

/// A fully loaded experiment: the set plus the optional wear calibration
/// and any non-fatal ingest diagnostics.
struct LoadedExperiment {
    ExperimentSet set;
    std::optional<WearParams> wear;
    Warnings warnings;
};

/// Power CSV, header `t_s,power_w`. Timestamps are shifted so the first
/// sample sits at t = 0. Throws FormatError/ParseError/ValidationError with
/// 1-based row references (the header is row 1).
TimeSeries load_power_csv(const std::filesystem::path& path);

/// Telemetry CSV, header
/// `t_s,joint,torque_nm,vel_rad_s[,i_target_a,i_actual_a,temp_c]`
/// (the last three columns are optional as a group). Rows may interleave
/// joints; per-joint rows must be in timestamp order and equally long.
/// Timestamps are shifted by the file-wide first timestamp, preserving
/// inter-joint offsets.
std::vector<JointTelemetry> load_telemetry_csv(const std::filesystem::path& path,
                                               int joint_count);

/// Manifest JSON. Unknown fields are skipped and reported via `warnings`.
ExperimentManifest load_manifest(const std::filesystem::path& path,
                                 Warnings* warnings = nullptr);

/// Loads the manifest and every referenced file; per-file failures are
/// aggregated into a single ValidationError listing every failing file.
LoadedExperiment load_experiment(const std::filesystem::path& manifest_path);

/// Writers for the same dialect (17-significant-digit floats, LF endings).
void write_power_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_telemetry_csv(const std::filesystem::path& path,
                         const std::vector<JointTelemetry>& joints);
void write_manifest(const std::filesystem::path& path,
                    const ExperimentManifest& manifest);

} // namespace powerbench
