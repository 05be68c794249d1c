#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>

#include "powerbench/energy.hpp"
#include "powerbench/ingest.hpp"
#include "powerbench/reliability.hpp"
#include "powerbench/stats.hpp"
#include "powerbench/wear.hpp"

namespace powerbench {

struct AnalyzeOptions {
    ReliabilityWeights weights{};
    ReliabilityOptions reliability{};
};

/// Everything the analyze pipeline produces for one experiment set.
/// Sections that the inputs cannot support (reliability with one run, wear
/// without current data) stay unset and leave a warning.
struct MetricReport {
    std::string program_id;
    std::string condition_id;
    size_t n_runs = 0;
    size_t n_success = 0;
    RobotConstants constants;
    EnergyAggregate energy;
    std::optional<ReliabilityResult> reliability;
    std::optional<WearResult> wear;
    std::vector<double> grid;
    std::optional<BandProfile> band;
    std::optional<Matrix> heatmap_power;
    std::optional<Matrix> heatmap_alpha;
    std::vector<std::string> run_ids;
    std::vector<bool> run_success;
    std::vector<double> run_durations;
    AnalyzeOptions options;
    Warnings warnings;
};

MetricReport analyze_experiment(const LoadedExperiment& experiment,
                                const AnalyzeOptions& options = {});

/// Writes metrics.json, metrics.csv, mean_profile.csv, ci_band.csv and the
/// heatmap CSVs (each only when the corresponding section exists).
void write_report_files(const MetricReport& report,
                        const std::filesystem::path& out_dir);

/// Human-readable aggregate table (values rounded here and only here).
void print_summary(const MetricReport& report, std::ostream& out);

/// Per-run column used by pairwise tests and rankings. Valid names:
/// utilization, basal_energy, actual_energy, mech_energy, conversion,
/// c1, c3, alpha. Throws DomainError when the column is unavailable.
std::vector<double> per_run_metric(const MetricReport& report,
                                   const std::string& metric);

struct CompareOptions {
    std::string metric = "utilization"; // column under the pairwise t-tests
    bool paired = true;                 // false = summary only, no tests
};

struct PairwiseTest {
    size_t a = 0;
    size_t b = 0;
    std::string metric;
    std::optional<TTestResult> result; // unset when the pairing is degenerate
    std::string note;
};

struct RankingEntry {
    size_t set_index = 0;
    double value = 0.0;
    int rank = 0;
    bool tied = false;
};

struct ComparisonReport {
    std::vector<MetricReport> sets;
    std::vector<std::string> labels; // unique, derived from program/condition
    std::vector<PairwiseTest> tests;
    /// metric name -> entries ordered best first; ties share a rank and are
    /// ordered by label.
    std::map<std::string, std::vector<RankingEntry>> rankings;
    Warnings warnings;
};

ComparisonReport compare_experiments(std::vector<MetricReport> sets,
                                     const CompareOptions& options = {});

void write_comparison_files(const ComparisonReport& report,
                            const std::filesystem::path& out_dir);

void print_comparison(const ComparisonReport& report, std::ostream& out);

} // namespace powerbench
