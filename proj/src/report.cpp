#include "powerbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "powerbench/numeric.hpp"

namespace powerbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json json_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

ordered_json json_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

std::string csv_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::string csv_cell(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

// Per-run stress: the run's per-joint peaks accumulated over joints.
std::vector<double> alpha_per_run(const WearResult& wear) {
    std::vector<double> out;
    out.reserve(wear.peak.size());
    for (const auto& peaks : wear.peak) {
        out.push_back(sorted_sum(std::vector<double>(peaks.begin(), peaks.end())));
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

} // namespace

MetricReport analyze_experiment(const LoadedExperiment& experiment,
                                const AnalyzeOptions& options) {
    const ExperimentSet& set = experiment.set;
    validate(set);

    MetricReport report;
    report.program_id = set.program_id;
    report.condition_id = set.condition_id;
    report.n_runs = set.run_count();
    report.n_success = set.success_count();
    report.constants = set.constants;
    report.options = options;
    report.warnings = experiment.warnings;
    for (const auto& run : set.runs) {
        report.run_ids.push_back(run.id);
        report.run_success.push_back(run.success);
        report.run_durations.push_back(run.duration());
    }

    report.energy = aggregate_energy(set);
    for (auto& w : report.energy.warnings) report.warnings.push_back(w);

    if (set.run_count() >= 2) {
        report.reliability =
            evaluate_reliability(set, options.weights, options.reliability);
        for (auto& w : report.reliability->warnings) report.warnings.push_back(w);
        report.grid = report.reliability->grid;
    } else {
        report.warnings.push_back(
            "reliability metrics require at least 2 runs; section skipped");
        report.grid = common_grid(set, options.reliability.grid_dt);
    }

    if (experiment.wear) {
        try {
            report.wear = alpha_stress(set, *experiment.wear);
        } catch (const WearUnavailableError& e) {
            report.warnings.push_back(std::string(e.what()) +
                                      "; stress section skipped");
        }
    } else {
        bool any_currents = false;
        for (const auto& run : set.runs) {
            for (const auto& joint : run.joints) {
                any_currents = any_currents || joint.current_target.has_value();
            }
        }
        if (any_currents) {
            report.warnings.push_back("current data present but the manifest has no "
                                      "wear calibration; stress section skipped");
        }
    }

    if (set.run_count() >= 2) {
        report.band = confidence_band(set, report.grid, 0.95);
    }
    report.heatmap_power = power_heatmap(set, report.grid);
    if (report.wear) {
        report.heatmap_alpha = alpha_heatmap(*report.wear, report.grid);
    }
    return report;
}

namespace {

ordered_json aggregate_json(const MetricReport& r) {
    ordered_json agg;
    agg["basal_energy_j"] = r.energy.mean.basal_energy_j;
    agg["actual_energy_j"] = r.energy.mean.actual_energy_j;
    agg["utilization"] = r.energy.mean.utilization;
    agg["positive_mech_energy_j"] = json_or_null(r.energy.mean.positive_mech_energy_j);
    agg["conversion"] = json_or_null(r.energy.mean.conversion);
    if (r.reliability) {
        agg["c1_mean"] = r.reliability->c1_mean;
        agg["c2"] = r.reliability->c2;
        agg["c3_mean"] = r.reliability->c3_mean;
        agg["reliability"] = r.reliability->reliability;
    } else {
        agg["c1_mean"] = nullptr;
        agg["c2"] = nullptr;
        agg["c3_mean"] = nullptr;
        agg["reliability"] = nullptr;
    }
    agg["alpha_stress"] =
        r.wear ? ordered_json(r.wear->alpha_stress) : ordered_json(nullptr);
    return agg;
}

ordered_json report_json(const MetricReport& r) {
    ordered_json j;
    j["program_id"] = r.program_id;
    j["condition_id"] = r.condition_id;
    j["n_runs"] = r.n_runs;
    j["n_success"] = r.n_success;
    j["options"] = {
        {"weights",
         {r.options.weights.w1, r.options.weights.w2, r.options.weights.w3}},
        {"include_failed_in_c13", r.options.reliability.include_failed_in_c13},
        {"cv_floor_w", r.options.reliability.cv_floor_w},
        {"grid_dt", r.options.reliability.grid_dt
                        ? ordered_json(*r.options.reliability.grid_dt)
                        : ordered_json(nullptr)},
        {"alpha_form", r.wear ? ordered_json(r.wear->form) : ordered_json(nullptr)},
    };
    j["constants"] = {
        {"electronics_power_w", r.constants.electronics_power_w},
        {"brake_power_w", r.constants.brake_power_w},
        {"joint_count", r.constants.joint_count},
        {"delta_potential_j", r.constants.delta_potential_j},
        {"delta_kinetic_j", r.constants.delta_kinetic_j},
    };

    std::vector<double> alpha_runs;
    if (r.wear) alpha_runs = alpha_per_run(*r.wear);

    ordered_json runs = ordered_json::array();
    for (size_t i = 0; i < r.n_runs; ++i) {
        const auto& e = r.energy.per_run[i];
        ordered_json run;
        run["id"] = r.run_ids[i];
        run["success"] = static_cast<bool>(r.run_success[i]);
        run["duration_s"] = r.run_durations[i];
        run["basal_energy_j"] = e.basal_energy_j;
        run["actual_energy_j"] = e.actual_energy_j;
        run["utilization"] = e.utilization;
        run["positive_mech_energy_j"] = json_or_null(e.positive_mech_energy_j);
        run["conversion"] = json_or_null(e.conversion);
        run["c1"] = r.reliability ? json_or_null(r.reliability->c1_per_run[i])
                                  : ordered_json(nullptr);
        run["c3"] = r.reliability ? json_or_null(r.reliability->c3_per_run[i])
                                  : ordered_json(nullptr);
        run["alpha_peak_sum"] =
            r.wear ? ordered_json(alpha_runs[i]) : ordered_json(nullptr);
        runs.push_back(std::move(run));
    }
    j["runs"] = std::move(runs);
    j["aggregate"] = aggregate_json(r);

    if (!r.grid.empty()) {
        ordered_json grid;
        grid["dt"] = r.grid.size() > 1 ? r.grid[1] - r.grid[0] : 0.0;
        grid["t_end"] = r.grid.back();
        grid["points"] = r.grid.size();
        if (r.reliability) {
            grid["dropped_seconds_per_run"] = r.reliability->dropped_seconds_per_run;
        }
        j["grid"] = std::move(grid);
    } else {
        j["grid"] = nullptr;
    }
    j["warnings"] = r.warnings;
    return j;
}

void write_metrics_csv(const MetricReport& r, const fs::path& path) {
    std::vector<double> alpha_runs;
    if (r.wear) alpha_runs = alpha_per_run(*r.wear);

    std::ofstream out = open_out(path);
    out << "run_id,success,duration_s,basal_energy_j,actual_energy_j,utilization,"
           "positive_mech_energy_j,conversion,c1,c3,alpha_peak_sum,"
           "c2,reliability,alpha_stress\n";
    for (size_t i = 0; i < r.n_runs; ++i) {
        const auto& e = r.energy.per_run[i];
        out << r.run_ids[i] << ',' << (r.run_success[i] ? "true" : "false") << ','
            << format_double(r.run_durations[i]) << ','
            << format_double(e.basal_energy_j) << ','
            << format_double(e.actual_energy_j) << ',' << format_double(e.utilization)
            << ',' << csv_cell(e.positive_mech_energy_j) << ',' << csv_cell(e.conversion)
            << ','
            << (r.reliability ? csv_cell(r.reliability->c1_per_run[i]) : std::string())
            << ','
            << (r.reliability ? csv_cell(r.reliability->c3_per_run[i]) : std::string())
            << ',' << (r.wear ? format_double(alpha_runs[i]) : std::string())
            << ",,,\n";
    }
    const auto& m = r.energy.mean;
    out << "aggregate,,," << format_double(m.basal_energy_j) << ','
        << format_double(m.actual_energy_j) << ',' << format_double(m.utilization) << ','
        << csv_cell(m.positive_mech_energy_j) << ',' << csv_cell(m.conversion) << ','
        << (r.reliability ? format_double(r.reliability->c1_mean) : std::string()) << ','
        << (r.reliability ? format_double(r.reliability->c3_mean) : std::string())
        << ",,"
        << (r.reliability ? format_double(r.reliability->c2) : std::string()) << ','
        << (r.reliability ? format_double(r.reliability->reliability) : std::string())
        << ',' << (r.wear ? format_double(r.wear->alpha_stress) : std::string()) << "\n";
}

void write_band_csv(const BandProfile& band, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "t_s,mean_w,lower_w,upper_w\n";
    for (size_t i = 0; i < band.grid.size(); ++i) {
        out << format_double(band.grid[i]) << ',' << format_double(band.mean[i]) << ','
            << format_double(band.lower[i]) << ',' << format_double(band.upper[i])
            << "\n";
    }
}

void write_heatmap_csv(const Matrix& m, const std::vector<std::string>& run_ids,
                       std::span<const double> grid, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "t_s";
    for (const auto& id : run_ids) out << ',' << id;
    out << "\n";
    for (size_t g = 0; g < m.cols; ++g) {
        out << format_double(grid[g]);
        for (size_t r = 0; r < m.rows; ++r) out << ',' << format_double(m.at(r, g));
        out << "\n";
    }
}

} // namespace

void write_report_files(const MetricReport& report, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out_dir.string() +
                      "': " + ec.message());
    }
    {
        std::ofstream out = open_out(out_dir / "metrics.json");
        out << report_json(report).dump(2) << "\n";
    }
    write_metrics_csv(report, out_dir / "metrics.csv");
    if (report.reliability) {
        write_power_csv(out_dir / "mean_profile.csv", report.reliability->mean_profile);
    }
    if (report.band) {
        write_band_csv(*report.band, out_dir / "ci_band.csv");
    }
    if (report.heatmap_power) {
        write_heatmap_csv(*report.heatmap_power, report.run_ids, report.grid,
                          out_dir / "heatmap_power.csv");
    }
    if (report.heatmap_alpha) {
        write_heatmap_csv(*report.heatmap_alpha, report.run_ids, report.grid,
                          out_dir / "heatmap_alpha.csv");
    }
}

void print_summary(const MetricReport& report, std::ostream& out) {
    char line[256];
    out << "program " << report.program_id << " / " << report.condition_id << ": "
        << report.n_success << "/" << report.n_runs << " runs successful\n";
    const auto& m = report.energy.mean;
    std::snprintf(line, sizeof(line),
                  "  E_B %10.2f J   E_R %10.2f J   f_U %6.4f", m.basal_energy_j,
                  m.actual_energy_j, m.utilization);
    out << line;
    if (m.positive_mech_energy_j) {
        std::snprintf(line, sizeof(line), "   E_MP %8.2f J   f_C %6.4f",
                      *m.positive_mech_energy_j, *m.conversion);
        out << line;
    }
    out << "\n";
    if (report.reliability) {
        const auto& rel = *report.reliability;
        std::snprintf(line, sizeof(line),
                      "  c1 %6.4f   c2 %6.4f   c3 %6.4f   f_R %6.4f", rel.c1_mean,
                      rel.c2, rel.c3_mean, rel.reliability);
        out << line << "\n";
    }
    if (report.wear) {
        std::snprintf(line, sizeof(line), "  alpha_S %8.4f   (form: %s)",
                      report.wear->alpha_stress, report.wear->form.c_str());
        out << line << "\n";
    }
    for (const auto& w : report.warnings) {
        out << "  warning: " << w << "\n";
    }
}

std::vector<double> per_run_metric(const MetricReport& report,
                                   const std::string& metric) {
    std::vector<double> out;
    out.reserve(report.n_runs);
    auto need_reliability = [&]() -> const ReliabilityResult& {
        if (!report.reliability) {
            throw DomainError("metric '" + metric + "' needs the reliability section, "
                              "which is unavailable for " + report.program_id);
        }
        return *report.reliability;
    };
    for (size_t i = 0; i < report.n_runs; ++i) {
        const auto& e = report.energy.per_run[i];
        if (metric == "utilization") {
            out.push_back(e.utilization);
        } else if (metric == "basal_energy") {
            out.push_back(e.basal_energy_j);
        } else if (metric == "actual_energy") {
            out.push_back(e.actual_energy_j);
        } else if (metric == "mech_energy") {
            if (!e.positive_mech_energy_j) {
                throw DomainError("metric 'mech_energy' unavailable: run '" +
                                  report.run_ids[i] + "' has no telemetry");
            }
            out.push_back(*e.positive_mech_energy_j);
        } else if (metric == "conversion") {
            if (!e.conversion) {
                throw DomainError("metric 'conversion' unavailable: run '" +
                                  report.run_ids[i] + "' has no telemetry");
            }
            out.push_back(*e.conversion);
        } else if (metric == "c1" || metric == "c3") {
            const auto& rel = need_reliability();
            const double v =
                metric == "c1" ? rel.c1_per_run[i] : rel.c3_per_run[i];
            if (std::isnan(v)) {
                throw DomainError("metric '" + metric + "' missing for failed run '" +
                                  report.run_ids[i] +
                                  "'; rerun with failed runs included");
            }
            out.push_back(v);
        } else if (metric == "alpha") {
            if (!report.wear) {
                throw DomainError("metric 'alpha' needs the stress section, which is "
                                  "unavailable for " + report.program_id);
            }
            out.push_back(alpha_per_run(*report.wear)[i]);
        } else {
            throw DomainError("unknown metric '" + metric +
                              "' (expected utilization, basal_energy, actual_energy, "
                              "mech_energy, conversion, c1, c3 or alpha)");
        }
    }
    return out;
}

namespace {

// Lower is better for energy and stress; higher for the coefficients.
bool higher_is_better(const std::string& metric) {
    return metric == "utilization" || metric == "conversion" ||
           metric == "reliability" || metric == "c1" || metric == "c3";
}

std::optional<double> aggregate_metric(const MetricReport& r,
                                       const std::string& metric) {
    if (metric == "utilization") return r.energy.mean.utilization;
    if (metric == "actual_energy") return r.energy.mean.actual_energy_j;
    if (metric == "conversion") return r.energy.mean.conversion;
    if (metric == "reliability") {
        if (!r.reliability) return std::nullopt;
        return r.reliability->reliability;
    }
    if (metric == "alpha_stress") {
        if (!r.wear) return std::nullopt;
        return r.wear->alpha_stress;
    }
    return std::nullopt;
}

const std::vector<std::string> kRankedMetrics = {
    "utilization", "actual_energy", "conversion", "reliability", "alpha_stress"};

} // namespace

ComparisonReport compare_experiments(std::vector<MetricReport> sets,
                                     const CompareOptions& options) {
    if (sets.size() < 2) {
        throw ValidationError("compare needs at least 2 experiment sets");
    }
    ComparisonReport cmp;
    cmp.sets = std::move(sets);

    // Unique labels; duplicates (the same manifest twice) get an ordinal.
    std::map<std::string, int> seen;
    for (const auto& s : cmp.sets) {
        std::string label = s.program_id + "/" + s.condition_id;
        const int n = ++seen[label];
        if (n > 1) label += "#" + std::to_string(n);
        cmp.labels.push_back(label);
    }

    if (options.paired) {
        for (size_t a = 0; a < cmp.sets.size(); ++a) {
            for (size_t b = a + 1; b < cmp.sets.size(); ++b) {
                if (cmp.sets[a].n_runs != cmp.sets[b].n_runs) {
                    throw ValidationError(
                        "paired comparison needs equal run counts (" + cmp.labels[a] +
                        " has " + std::to_string(cmp.sets[a].n_runs) + ", " +
                        cmp.labels[b] + " has " + std::to_string(cmp.sets[b].n_runs) +
                        "); use --unpaired-summary to skip the tests");
                }
                PairwiseTest test;
                test.a = a;
                test.b = b;
                test.metric = options.metric;
                const auto va = per_run_metric(cmp.sets[a], options.metric);
                const auto vb = per_run_metric(cmp.sets[b], options.metric);
                try {
                    test.result = paired_t_test(va, vb);
                } catch (const DomainError& e) {
                    test.note = e.what();
                    cmp.warnings.push_back(cmp.labels[a] + " vs " + cmp.labels[b] +
                                           ": " + e.what());
                }
                cmp.tests.push_back(std::move(test));
            }
        }
    } else {
        cmp.warnings.push_back("pairwise t-tests skipped (--unpaired-summary)");
    }

    for (const auto& metric : kRankedMetrics) {
        std::vector<RankingEntry> entries;
        for (size_t i = 0; i < cmp.sets.size(); ++i) {
            if (auto v = aggregate_metric(cmp.sets[i], metric)) {
                entries.push_back({i, *v, 0, false});
            }
        }
        if (entries.size() < 2) continue;
        const bool desc = higher_is_better(metric);
        std::sort(entries.begin(), entries.end(),
                  [&](const RankingEntry& x, const RankingEntry& y) {
                      if (x.value != y.value) {
                          return desc ? x.value > y.value : x.value < y.value;
                      }
                      return cmp.labels[x.set_index] < cmp.labels[y.set_index];
                  });
        for (size_t i = 0; i < entries.size(); ++i) {
            if (i > 0 && entries[i].value == entries[i - 1].value) {
                entries[i].rank = entries[i - 1].rank;
                entries[i].tied = true;
                entries[i - 1].tied = true;
            } else {
                entries[i].rank = static_cast<int>(i) + 1;
            }
        }
        cmp.rankings[metric] = std::move(entries);
    }
    return cmp;
}

void write_comparison_files(const ComparisonReport& report, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out_dir.string() +
                      "': " + ec.message());
    }

    ordered_json j;
    ordered_json sets = ordered_json::array();
    for (size_t i = 0; i < report.sets.size(); ++i) {
        const auto& s = report.sets[i];
        ordered_json e;
        e["label"] = report.labels[i];
        e["program_id"] = s.program_id;
        e["condition_id"] = s.condition_id;
        e["n_runs"] = s.n_runs;
        e["n_success"] = s.n_success;
        e["aggregate"] = aggregate_json(s);
        sets.push_back(std::move(e));
    }
    j["sets"] = std::move(sets);

    ordered_json tests = ordered_json::array();
    for (const auto& t : report.tests) {
        ordered_json e;
        e["a"] = report.labels[t.a];
        e["b"] = report.labels[t.b];
        e["metric"] = t.metric;
        if (t.result) {
            e["t"] = t.result->t_statistic;
            e["dof"] = t.result->degrees_of_freedom;
            e["p_value"] = t.result->p_value;
            e["significant_at_0_05"] = t.result->significant_at_0_05;
        } else {
            e["note"] = t.note;
        }
        tests.push_back(std::move(e));
    }
    j["t_tests"] = std::move(tests);

    ordered_json rankings;
    for (const auto& [metric, entries] : report.rankings) {
        ordered_json arr = ordered_json::array();
        for (const auto& e : entries) {
            arr.push_back({{"label", report.labels[e.set_index]},
                           {"value", e.value},
                           {"rank", e.rank},
                           {"tied", e.tied}});
        }
        rankings[metric] = std::move(arr);
    }
    j["rankings"] = std::move(rankings);
    j["warnings"] = report.warnings;

    {
        std::ofstream out = open_out(out_dir / "comparison.json");
        out << j.dump(2) << "\n";
    }

    std::ofstream csv = open_out(out_dir / "comparison.csv");
    csv << "label,program_id,condition_id,n_runs,n_success,basal_energy_j,"
           "actual_energy_j,utilization,positive_mech_energy_j,conversion,"
           "c1_mean,c2,c3_mean,reliability,alpha_stress\n";
    for (size_t i = 0; i < report.sets.size(); ++i) {
        const auto& s = report.sets[i];
        const auto& m = s.energy.mean;
        csv << report.labels[i] << ',' << s.program_id << ',' << s.condition_id << ','
            << s.n_runs << ',' << s.n_success << ',' << format_double(m.basal_energy_j)
            << ',' << format_double(m.actual_energy_j) << ','
            << format_double(m.utilization) << ',' << csv_cell(m.positive_mech_energy_j)
            << ',' << csv_cell(m.conversion) << ','
            << (s.reliability ? format_double(s.reliability->c1_mean) : std::string())
            << ','
            << (s.reliability ? format_double(s.reliability->c2) : std::string()) << ','
            << (s.reliability ? format_double(s.reliability->c3_mean) : std::string())
            << ','
            << (s.reliability ? format_double(s.reliability->reliability)
                              : std::string())
            << ',' << (s.wear ? format_double(s.wear->alpha_stress) : std::string())
            << "\n";
    }
}

void print_comparison(const ComparisonReport& report, std::ostream& out) {
    char line[256];
    out << "comparison of " << report.sets.size() << " experiment sets\n";
    for (size_t i = 0; i < report.sets.size(); ++i) {
        print_summary(report.sets[i], out);
    }
    if (!report.tests.empty()) {
        out << "pairwise paired t-tests (" << report.tests.front().metric << "):\n";
        for (const auto& t : report.tests) {
            if (t.result) {
                std::snprintf(line, sizeof(line),
                              "  %s vs %s: t=%.4f dof=%d p=%.6f %s",
                              report.labels[t.a].c_str(), report.labels[t.b].c_str(),
                              t.result->t_statistic, t.result->degrees_of_freedom,
                              t.result->p_value,
                              t.result->significant_at_0_05 ? "(significant)"
                                                            : "(not significant)");
                out << line << "\n";
            } else {
                out << "  " << report.labels[t.a] << " vs " << report.labels[t.b]
                    << ": " << t.note << "\n";
            }
        }
    }
    for (const auto& [metric, entries] : report.rankings) {
        out << "ranking by " << metric << ":";
        for (const auto& e : entries) {
            out << " " << e.rank << "." << report.labels[e.set_index];
            if (e.tied) out << "(tie)";
        }
        out << "\n";
    }
    for (const auto& w : report.warnings) {
        out << "warning: " << w << "\n";
    }
}

} // namespace powerbench
