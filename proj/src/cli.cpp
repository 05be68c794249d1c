#include "powerbench/cli.hpp"

#include <cstdlib>
#include <future>
#include <ostream>

#include "powerbench/synthgen.hpp"

namespace powerbench::cli {

namespace fs = std::filesystem;

bool parallel_enabled() {
    const char* v = std::getenv("POWERBENCH_NO_PARALLEL");
    return !(v && std::string(v) == "1");
}

namespace {

template <typename Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitMetricDomain;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitMetricDomain;
    } catch (const WearUnavailableError& e) {
        err << "error: " << e.what() << "\n";
        return kExitMetricDomain;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace

int cmd_analyze(const fs::path& manifest_path, const fs::path& out_dir,
                const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        const LoadedExperiment experiment = load_experiment(manifest_path);
        const MetricReport report = analyze_experiment(experiment, options);
        write_report_files(report, out_dir);
        print_summary(report, out);
        out << "report written to " << out_dir.string() << "\n";
    });
}

int cmd_compare(const std::vector<fs::path>& manifest_paths, const fs::path& out_dir,
                const AnalyzeOptions& options, const CompareOptions& compare_options,
                std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        if (manifest_paths.size() < 2) {
            throw ValidationError("compare needs at least 2 manifests");
        }
        auto analyze_one = [&](const fs::path& path) {
            return analyze_experiment(load_experiment(path), options);
        };

        std::vector<MetricReport> reports;
        reports.reserve(manifest_paths.size());
        if (parallel_enabled() && manifest_paths.size() > 1) {
            std::vector<std::future<MetricReport>> futures;
            futures.reserve(manifest_paths.size());
            for (const auto& path : manifest_paths) {
                futures.push_back(
                    std::async(std::launch::async, analyze_one, path));
            }
            for (auto& f : futures) reports.push_back(f.get());
        } else {
            for (const auto& path : manifest_paths) {
                reports.push_back(analyze_one(path));
            }
        }

        const ComparisonReport cmp =
            compare_experiments(std::move(reports), compare_options);
        write_comparison_files(cmp, out_dir);
        print_comparison(cmp, out);
        out << "comparison written to " << out_dir.string() << "\n";
    });
}

int cmd_synth(const fs::path& scenario_path, const fs::path& out_dir,
              std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        const ScenarioSpec spec = load_scenario(scenario_path);
        const GeneratedExperiment experiment = generate(spec);
        const fs::path manifest = write_experiment(experiment, out_dir);
        out << "generated " << experiment.set.runs.size() << " run(s) under "
            << out_dir.string() << "\n";
        out << "manifest: " << manifest.string() << "\n";
    });
}

} // namespace powerbench::cli
