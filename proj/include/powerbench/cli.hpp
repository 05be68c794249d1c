#pragma once

#include <filesystem>
#include <iosfwd>

#include "powerbench/report.hpp"

namespace powerbench::cli {

/// Exit codes: 0 success, 1 validation/parse, 2 metric-domain, 3 IO.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitMetricDomain = 2;
inline constexpr int kExitIo = 3;

/// True unless POWERBENCH_NO_PARALLEL=1 is set.
bool parallel_enabled();

/// Loads a manifest, runs the full metric pipeline, writes the report files
/// into out_dir and prints a summary. Returns an exit code; errors are
/// printed to `err`.
int cmd_analyze(const std::filesystem::path& manifest_path,
                const std::filesystem::path& out_dir, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err);

/// Analyzes every manifest (in parallel unless disabled), runs pairwise
/// t-tests and rankings, writes comparison files.
int cmd_compare(const std::vector<std::filesystem::path>& manifest_paths,
                const std::filesystem::path& out_dir, const AnalyzeOptions& options,
                const CompareOptions& compare_options, std::ostream& out,
                std::ostream& err);

/// Generates a synthetic experiment from a scenario file; the output is
/// re-loadable by cmd_analyze and ships a ground_truth.json sidecar.
int cmd_synth(const std::filesystem::path& scenario_path,
              const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err);

} // namespace powerbench::cli
