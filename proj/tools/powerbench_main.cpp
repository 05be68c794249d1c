#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "powerbench/cli.hpp"

namespace {

// "--weights 1,2,1" -> ReliabilityWeights
powerbench::ReliabilityWeights parse_weights(const std::string& arg) {
    powerbench::ReliabilityWeights w;
    double v1 = 0, v2 = 0, v3 = 0;
    char extra = 0;
    if (std::sscanf(arg.c_str(), "%lf,%lf,%lf%c", &v1, &v2, &v3, &extra) != 3) {
        throw CLI::ValidationError("--weights", "expected three comma-separated "
                                                "numbers, e.g. 1,1,1");
    }
    w.w1 = v1;
    w.w2 = v2;
    w.w3 = v3;
    return w;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"powerbench: energy-efficiency and reliability metrics for robot "
                 "programs from recorded power profiles"};
    app.require_subcommand(1);

    std::string weights_arg = "1,1,1";
    double grid_dt = 0.0;
    double cv_floor = 1e-6;
    bool include_failed = true;
    std::string out_dir = "powerbench_out";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-o,--out", out_dir, "Output directory")
            ->capture_default_str();
        cmd->add_option("--weights", weights_arg,
                        "Reliability weights w1,w2,w3 (default 1,1,1)");
        cmd->add_option("--grid-dt", grid_dt,
                        "Override the common grid step in seconds");
        cmd->add_option("--cv-floor", cv_floor,
                        "Mean-profile floor (W) below which cv samples are excluded")
            ->capture_default_str();
        cmd->add_flag("--include-failed-in-c13,!--successful-only-c13",
                      include_failed,
                      "Include failed runs in the c1/c3 averages (default on)");
    };

    std::string manifest;
    auto* analyze = app.add_subcommand(
        "analyze", "Compute all metrics for one experiment manifest");
    analyze->add_option("manifest", manifest, "Experiment manifest (JSON)")
        ->required();
    add_common(analyze);

    std::vector<std::string> manifests;
    std::string metric = "utilization";
    bool unpaired = false;
    auto* compare = app.add_subcommand(
        "compare", "Compare two or more experiment manifests side by side");
    compare->add_option("manifests", manifests, "Experiment manifests (JSON)")
        ->required()
        ->expected(2, -1);
    compare->add_option("--metric", metric,
                        "Per-run column for the pairwise t-tests (utilization, "
                        "basal_energy, actual_energy, mech_energy, conversion, "
                        "c1, c3, alpha)")
        ->capture_default_str();
    compare->add_flag("--unpaired-summary", unpaired,
                      "Skip pairwise t-tests (for unequal run counts)");
    add_common(compare);

    std::string scenario;
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic experiment from a scenario file");
    synth->add_option("scenario", scenario, "Scenario spec (JSON)")->required();
    synth->add_option("-o,--out", out_dir, "Output directory")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    powerbench::AnalyzeOptions options;
    try {
        options.weights = parse_weights(weights_arg);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return powerbench::cli::kExitValidation;
    }
    if (grid_dt > 0) options.reliability.grid_dt = grid_dt;
    options.reliability.cv_floor_w = cv_floor;
    options.reliability.include_failed_in_c13 = include_failed;

    if (analyze->parsed()) {
        return powerbench::cli::cmd_analyze(manifest, out_dir, options, std::cout,
                                            std::cerr);
    }
    if (compare->parsed()) {
        powerbench::CompareOptions compare_options;
        compare_options.metric = metric;
        compare_options.paired = !unpaired;
        std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
        return powerbench::cli::cmd_compare(paths, out_dir, options, compare_options,
                                            std::cout, std::cerr);
    }
    return powerbench::cli::cmd_synth(scenario, out_dir, std::cout, std::cerr);
}
