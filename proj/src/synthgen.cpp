#include "powerbench/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "powerbench/numeric.hpp"

namespace powerbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Piecewise-linear shape with knots snapped onto the sample grid; the
// snapping keeps sampled trapezoidal integrals equal to the analytic area.
struct LinearShape {
    std::vector<double> knots; // strictly increasing
    std::vector<double> vals;  // same length

    double eval(double t) const {
        if (t <= knots.front() || t >= knots.back()) return 0.0;
        auto it = std::upper_bound(knots.begin(), knots.end(), t);
        const size_t i = static_cast<size_t>(it - knots.begin()) - 1;
        if (t == knots[i]) return vals[i];
        const double w = (t - knots[i]) / (knots[i + 1] - knots[i]);
        return vals[i] + w * (vals[i + 1] - vals[i]);
    }

    // Analytic integral over [knots.front(), min(knots.back(), cut)].
    double area_until(double cut) const {
        double area = 0.0;
        for (size_t i = 1; i < knots.size(); ++i) {
            const double a = knots[i - 1];
            const double b = knots[i];
            if (cut <= a) break;
            if (cut >= b) {
                area += (b - a) * 0.5 * (vals[i] + vals[i - 1]);
            } else {
                const double w = (cut - a) / (b - a);
                const double vc = vals[i - 1] + w * (vals[i] - vals[i - 1]);
                area += (cut - a) * 0.5 * (vc + vals[i - 1]);
                break;
            }
        }
        return area;
    }

    double area() const { return area_until(knots.back()); }
};

double snap(double t, double dt) { return std::round(t / dt) * dt; }

// Trapezoid pulse: ramp up over the first quarter, plateau, ramp down over
// the last quarter.
LinearShape bump_shape(const MotionBump& bump, double dt) {
    const double t0 = snap(bump.start_s, dt);
    const double t1 = snap(bump.start_s + 0.25 * bump.width_s, dt);
    const double t2 = snap(bump.start_s + 0.75 * bump.width_s, dt);
    const double t3 = snap(bump.start_s + bump.width_s, dt);
    return LinearShape{{t0, t1, t2, t3}, {0.0, bump.peak_w, bump.peak_w, 0.0}};
}

// Spike: one-sample ramps around a plateau of (width - dt), so the area is
// exactly peak * width.
LinearShape spike_shape(const FailureSpec& f, double dt) {
    const double t0 = snap(f.start_s, dt);
    const double t2 = snap(f.start_s + f.width_s, dt);
    return LinearShape{{t0, t0 + dt, t2, t2 + dt}, {0.0, f.peak_w, f.peak_w, 0.0}};
}

LinearShape scaled(LinearShape shape, double factor) {
    for (double& v : shape.vals) v *= factor;
    return shape;
}

void check_shape(const LinearShape& s, double duration, const std::string& what) {
    for (size_t i = 1; i < s.knots.size(); ++i) {
        if (!(s.knots[i] > s.knots[i - 1])) {
            throw ValidationError(what + ": knots collapse after grid snapping; "
                                         "widen it or shrink dt");
        }
    }
    if (s.knots.front() < 0 || s.knots.back() > duration) {
        throw ValidationError(what + ": extends outside [0, " +
                              format_double(duration) + "] s");
    }
}

struct RunFailures {
    std::vector<FailureSpec> spikes;
    bool dropout = false;
    std::optional<double> cut_s;
};

std::vector<RunFailures> failures_by_run(const ScenarioSpec& spec) {
    std::vector<RunFailures> out(static_cast<size_t>(spec.n_runs));
    for (const auto& f : spec.failures) {
        auto& rf = out[static_cast<size_t>(f.run_index)];
        switch (f.mode) {
        case FailureMode::Spike:
            rf.spikes.push_back(f);
            break;
        case FailureMode::Dropout:
            rf.dropout = true;
            break;
        case FailureMode::Truncation:
            rf.cut_s = rf.cut_s ? std::min(*rf.cut_s, f.at_s) : f.at_s;
            break;
        }
    }
    return out;
}

std::string run_id(int index, int n_runs) {
    const int digits = n_runs > 100 ? 3 : 2;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "run%0*d", digits, index);
    return buf;
}

} // namespace

void validate(const ScenarioSpec& spec) {
    if (spec.n_runs < 1) throw ValidationError("scenario: n_runs must be >= 1");
    if (!(spec.dt_s > 0)) throw ValidationError("scenario: dt_s must be positive");
    if (spec.duration_s < 2 * spec.dt_s) {
        throw ValidationError("scenario: duration must cover at least 2 samples");
    }
    if (spec.noise_std_w < 0) {
        throw ValidationError("scenario: noise_std_w must be >= 0");
    }
    if (spec.baseline_w < 0) {
        throw ValidationError("scenario: baseline_w must be >= 0");
    }
    const double duration = snap(spec.duration_s, spec.dt_s);
    for (const auto& bump : spec.bumps) {
        if (bump.width_s < 4 * spec.dt_s) {
            throw ValidationError("scenario: bump width " + format_double(bump.width_s) +
                                  " s needs at least 4 samples");
        }
        check_shape(bump_shape(bump, spec.dt_s), duration, "scenario: bump");
        if (spec.telemetry) {
            // room for the return swing after the bump
            if (bump.start_s + 1.5 * bump.width_s > duration) {
                throw ValidationError(
                    "scenario: bump return swing extends past the duration");
            }
        }
    }
    for (const auto& f : spec.failures) {
        if (f.run_index < 0 || f.run_index >= spec.n_runs) {
            throw ValidationError("scenario: failure run_index " +
                                  std::to_string(f.run_index) + " outside 0.." +
                                  std::to_string(spec.n_runs - 1));
        }
        if (f.mode == FailureMode::Spike) {
            if (f.width_s < 2 * spec.dt_s) {
                throw ValidationError("scenario: spike width " +
                                      format_double(f.width_s) +
                                      " s needs at least 2 samples");
            }
            if (!(f.peak_w > 0)) {
                throw ValidationError("scenario: spike peak_w must be positive");
            }
            check_shape(spike_shape(f, spec.dt_s), duration, "scenario: spike");
        }
        if (f.mode == FailureMode::Truncation) {
            const double cut = snap(f.at_s, spec.dt_s);
            if (cut > duration) {
                throw ValidationError("scenario: truncation at " + format_double(f.at_s) +
                                      " s lies beyond the duration " +
                                      format_double(duration) + " s");
            }
            if (cut < 2 * spec.dt_s) {
                throw ValidationError("scenario: truncation at " + format_double(f.at_s) +
                                      " s leaves fewer than 3 samples");
            }
        }
    }
    if (spec.telemetry) {
        if (spec.telemetry->joint_count < 1) {
            throw ValidationError("scenario: telemetry joint_count must be >= 1");
        }
        if (spec.telemetry->joint_count != spec.constants.joint_count) {
            throw ValidationError("scenario: telemetry joint_count differs from "
                                  "constants.joint_count");
        }
    }
    validate(spec.constants);
}

GeneratedExperiment generate(const ScenarioSpec& spec) {
    validate(spec);
    const double dt = spec.dt_s;
    const auto n_samples = static_cast<size_t>(std::llround(spec.duration_s / dt));

    std::vector<LinearShape> bumps;
    for (const auto& bump : spec.bumps) bumps.push_back(bump_shape(bump, dt));

    // Per-joint velocity pulses: positive pulse per bump plus a negative
    // return swing of half the width right after it.
    struct JointShapes {
        double torque = 0.0;
        std::vector<LinearShape> pulses; // signed
    };
    std::vector<JointShapes> joint_shapes;
    if (spec.telemetry) {
        const auto& tc = *spec.telemetry;
        for (int j = 0; j < tc.joint_count; ++j) {
            JointShapes js;
            js.torque = tc.base_torque_nm + tc.torque_step_nm * j;
            const double peak_v = tc.base_velocity_rad_s + tc.velocity_step_rad_s * j;
            for (const auto& bump : spec.bumps) {
                const MotionBump move{bump.start_s, bump.width_s, peak_v};
                js.pulses.push_back(bump_shape(move, dt));
                const MotionBump swing{bump.start_s + bump.width_s, 0.5 * bump.width_s,
                                       -tc.return_swing_scale * peak_v};
                js.pulses.push_back(bump_shape(swing, dt));
            }
            joint_shapes.push_back(std::move(js));
        }
    }

    const auto per_run = failures_by_run(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    GeneratedExperiment out;
    out.set.program_id = spec.program_id;
    out.set.condition_id = spec.condition_id;
    out.set.constants = spec.constants;

    for (int r = 0; r < spec.n_runs; ++r) {
        const auto& rf = per_run[static_cast<size_t>(r)];
        size_t run_samples = n_samples;
        if (rf.cut_s) {
            run_samples = static_cast<size_t>(std::llround(snap(*rf.cut_s, dt) / dt));
        }
        std::vector<double> ts(run_samples + 1);
        for (size_t k = 0; k <= run_samples; ++k) ts[k] = static_cast<double>(k) * dt;
        const double t_end = ts.back();

        std::vector<LinearShape> spikes;
        for (const auto& f : rf.spikes) spikes.push_back(spike_shape(f, dt));

        std::vector<double> power(ts.size(), spec.baseline_w);
        for (size_t k = 0; k < ts.size(); ++k) {
            if (!rf.dropout) {
                for (const auto& b : bumps) power[k] += b.eval(ts[k]);
            }
            for (const auto& s : spikes) power[k] += s.eval(ts[k]);
        }

        RunGroundTruth truth;
        truth.id = run_id(r, spec.n_runs);
        truth.duration_s = t_end;
        truth.success = rf.spikes.empty() && !rf.dropout && !rf.cut_s;
        truth.actual_energy_j = spec.baseline_w * t_end;
        if (!rf.dropout) {
            for (const auto& b : bumps) truth.actual_energy_j += b.area_until(t_end);
        }
        for (const auto& s : spikes) truth.actual_energy_j += s.area_until(t_end);

        // Noise is injected after the ground truth capture.
        if (spec.noise_std_w > 0) {
            for (double& p : power) p += spec.noise_std_w * noise(rng);
        }

        Run run{
            .id = truth.id,
            .power = TimeSeries(ts, std::move(power)),
            .joints = {},
            .success = truth.success,
            .metadata = {},
        };

        if (spec.telemetry) {
            const auto& tc = *spec.telemetry;
            for (int j = 0; j < tc.joint_count; ++j) {
                const auto& js = joint_shapes[static_cast<size_t>(j)];
                std::vector<double> vel(ts.size(), 0.0);
                std::vector<double> envelope(ts.size(), 0.0); // |vel| / peak in [0,1]
                if (!rf.dropout) {
                    for (const auto& p : js.pulses) {
                        const double peak =
                            *std::max_element(p.vals.begin(), p.vals.end(),
                                              [](double a, double b) {
                                                  return std::abs(a) < std::abs(b);
                                              });
                        if (peak == 0.0) continue;
                        for (size_t k = 0; k < ts.size(); ++k) {
                            const double v = p.eval(ts[k]);
                            vel[k] += v;
                            envelope[k] += std::abs(v) / std::abs(peak);
                        }
                        truth.positive_mech_energy_j +=
                            peak > 0 ? js.torque * p.area_until(t_end) : 0.0;
                    }
                }
                std::vector<double> torque(ts.size(), js.torque);
                std::vector<double> i_target(ts.size());
                std::vector<double> i_actual(ts.size());
                for (size_t k = 0; k < ts.size(); ++k) {
                    i_target[k] = tc.current_offset_a + tc.current_slope_a * std::abs(vel[k]);
                    double deviation = tc.tracking_error_a * std::min(envelope[k], 1.0);
                    for (const auto& s : spikes) {
                        deviation +=
                            tc.failure_current_error_a * s.eval(ts[k]) / s.vals[1];
                    }
                    i_actual[k] = i_target[k] - deviation;
                }
                std::vector<double> temperature(
                    ts.size(), tc.base_temperature_c + tc.temperature_step_c * j);

                run.joints.push_back(JointTelemetry{
                    .joint_index = j,
                    .torque = TimeSeries(ts, std::move(torque)),
                    .velocity = TimeSeries(ts, std::move(vel)),
                    .current_target = TimeSeries(ts, std::move(i_target)),
                    .current_actual = TimeSeries(ts, std::move(i_actual)),
                    .temperature = TimeSeries(ts, std::move(temperature)),
                });
            }
        }
        validate(run);
        out.set.runs.push_back(std::move(run));
        out.truth.push_back(std::move(truth));
    }

    if (spec.telemetry) {
        WearParams wear;
        for (int j = 0; j < spec.telemetry->joint_count; ++j) {
            wear.joints.push_back(JointWearParams{
                .gear_ratio = 101.0,
                .torque_constant = 0.1,
                .max_gear_torque = 150.0,
                .weighting = {},
            });
        }
        out.wear = std::move(wear);
    }
    validate(out.set);
    return out;
}

fs::path write_experiment(const GeneratedExperiment& experiment,
                          const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out_dir.string() +
                      "': " + ec.message());
    }

    ExperimentManifest manifest;
    manifest.program_id = experiment.set.program_id;
    manifest.condition_id = experiment.set.condition_id;
    manifest.constants = experiment.set.constants;
    manifest.wear = experiment.wear;

    for (const auto& run : experiment.set.runs) {
        ManifestRun mr;
        mr.id = run.id;
        mr.success = run.success;
        mr.power_file = out_dir / (run.id + "_power.csv");
        write_power_csv(mr.power_file, run.power);
        if (run.has_telemetry()) {
            mr.telemetry_file = out_dir / (run.id + "_telemetry.csv");
            write_telemetry_csv(*mr.telemetry_file, run.joints);
        }
        manifest.runs.push_back(std::move(mr));
    }

    const fs::path manifest_path = out_dir / "manifest.json";
    write_manifest(manifest_path, manifest);

    ordered_json truth;
    ordered_json runs = ordered_json::array();
    for (const auto& t : experiment.truth) {
        ordered_json r = {
            {"id", t.id},
            {"actual_energy_j", t.actual_energy_j},
            {"duration_s", t.duration_s},
            {"success", t.success},
        };
        if (experiment.wear) {
            r["positive_mech_energy_j"] = t.positive_mech_energy_j;
        }
        runs.push_back(std::move(r));
    }
    truth["runs"] = std::move(runs);
    std::ofstream out(out_dir / "ground_truth.json");
    if (!out) {
        throw IoError("cannot write '" + (out_dir / "ground_truth.json").string() + "'");
    }
    out << truth.dump(2) << "\n";
    return manifest_path;
}

namespace {

FailureMode parse_mode(const std::string& mode) {
    if (mode == "spike") return FailureMode::Spike;
    if (mode == "dropout") return FailureMode::Dropout;
    if (mode == "truncation") return FailureMode::Truncation;
    throw ParseError("scenario: unknown failure mode '" + mode +
                     "' (expected spike, dropout or truncation)");
}

} // namespace

ScenarioSpec load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(path.string() + ": expected a JSON object");

    ScenarioSpec spec;
    std::set<std::string> known = {"program_id", "condition_id", "n_runs",
                                   "duration_s", "dt_s",         "baseline_w",
                                   "bumps",      "noise_std_w",  "failures",
                                   "seed",       "telemetry",    "constants"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            throw ParseError(path.string() + ": unknown scenario field '" + it.key() +
                             "'");
        }
    }
    auto check_keys = [&](const ordered_json& obj, const std::set<std::string>& ok,
                          const std::string& where) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!ok.count(it.key())) {
                throw ParseError(path.string() + ": unknown field '" + where + "." +
                                 it.key() + "'");
            }
        }
    };
    auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number()) {
            throw ParseError(std::string("scenario field '") + key + "': expected a number");
        }
        return j[key].get<double>();
    };
    if (j.contains("program_id")) spec.program_id = j["program_id"].get<std::string>();
    if (j.contains("condition_id")) spec.condition_id = j["condition_id"].get<std::string>();
    spec.n_runs = static_cast<int>(num("n_runs", spec.n_runs));
    spec.duration_s = num("duration_s", spec.duration_s);
    spec.dt_s = num("dt_s", spec.dt_s);
    spec.baseline_w = num("baseline_w", spec.baseline_w);
    spec.noise_std_w = num("noise_std_w", spec.noise_std_w);
    spec.seed = static_cast<std::uint64_t>(num("seed", 0.0));

    if (j.contains("bumps")) {
        for (const auto& b : j["bumps"]) {
            MotionBump bump;
            if (!b.is_object() || !b.contains("start_s") || !b.contains("width_s") ||
                !b.contains("peak_w")) {
                throw ParseError("scenario field 'bumps': each bump needs start_s, "
                                 "width_s and peak_w");
            }
            check_keys(b, {"start_s", "width_s", "peak_w"}, "bumps");
            bump.start_s = b["start_s"].get<double>();
            bump.width_s = b["width_s"].get<double>();
            bump.peak_w = b["peak_w"].get<double>();
            spec.bumps.push_back(bump);
        }
    }
    if (j.contains("failures")) {
        for (const auto& f : j["failures"]) {
            if (!f.is_object() || !f.contains("run_index") || !f.contains("mode")) {
                throw ParseError("scenario field 'failures': each failure needs "
                                 "run_index and mode");
            }
            check_keys(f, {"run_index", "mode", "start_s", "width_s", "peak_w", "at_s"},
                       "failures");
            FailureSpec fail;
            fail.run_index = f["run_index"].get<int>();
            fail.mode = parse_mode(f["mode"].get<std::string>());
            if (f.contains("start_s")) fail.start_s = f["start_s"].get<double>();
            if (f.contains("width_s")) fail.width_s = f["width_s"].get<double>();
            if (f.contains("peak_w")) fail.peak_w = f["peak_w"].get<double>();
            if (f.contains("at_s")) fail.at_s = f["at_s"].get<double>();
            spec.failures.push_back(fail);
        }
    }
    if (j.contains("telemetry")) {
        TelemetryConfig tc;
        const auto& t = j["telemetry"];
        if (!t.is_object()) throw ParseError("scenario field 'telemetry': expected object");
        check_keys(t, {"joint_count", "tracking_error_a", "failure_current_error_a"},
                   "telemetry");
        if (t.contains("joint_count")) tc.joint_count = t["joint_count"].get<int>();
        if (t.contains("tracking_error_a")) {
            tc.tracking_error_a = t["tracking_error_a"].get<double>();
        }
        if (t.contains("failure_current_error_a")) {
            tc.failure_current_error_a = t["failure_current_error_a"].get<double>();
        }
        spec.telemetry = tc;
    }
    if (j.contains("constants")) {
        const auto& c = j["constants"];
        if (!c.is_object()) throw ParseError("scenario field 'constants': expected object");
        check_keys(c,
                   {"electronics_power_w", "brake_power_w", "joint_count",
                    "delta_potential_j", "delta_kinetic_j"},
                   "constants");
        if (c.contains("electronics_power_w")) {
            spec.constants.electronics_power_w = c["electronics_power_w"].get<double>();
        }
        if (c.contains("brake_power_w")) {
            spec.constants.brake_power_w = c["brake_power_w"].get<double>();
        }
        if (c.contains("joint_count")) {
            spec.constants.joint_count = c["joint_count"].get<int>();
        }
        if (c.contains("delta_potential_j")) {
            spec.constants.delta_potential_j = c["delta_potential_j"].get<double>();
        }
        if (c.contains("delta_kinetic_j")) {
            spec.constants.delta_kinetic_j = c["delta_kinetic_j"].get<double>();
        }
    }
    validate(spec);
    return spec;
}

} // namespace powerbench
