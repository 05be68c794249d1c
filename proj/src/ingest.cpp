#include "powerbench/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "powerbench/numeric.hpp"

namespace powerbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kPowerHeader = "t_s,power_w";
constexpr const char* kTelemetryHeaderShort = "t_s,joint,torque_nm,vel_rad_s";
constexpr const char* kTelemetryHeaderFull =
    "t_s,joint,torque_nm,vel_rad_s,i_target_a,i_actual_a,temp_c";

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, const fs::path& path, size_t row,
                  const char* column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || cell.empty()) {
        throw ParseError(path.string() + ": row " + std::to_string(row) +
                         ", column '" + column + "': cannot parse '" + cell +
                         "' as a number");
    }
    return value;
}

long parse_int_cell(const std::string& cell, const fs::path& path, size_t row,
                    const char* column) {
    long value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || cell.empty()) {
        throw ParseError(path.string() + ": row " + std::to_string(row) +
                         ", column '" + column + "': cannot parse '" + cell +
                         "' as an integer");
    }
    return value;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

} // namespace

TimeSeries load_power_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kPowerHeader) {
        throw FormatError(path.string() + ": expected header '" +
                          std::string(kPowerHeader) + "', got '" + strip_cr(line) + "'");
    }
    std::vector<double> ts, vs;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2) {
            throw ParseError(path.string() + ": row " + std::to_string(row) +
                             ": expected 2 columns, got " + std::to_string(cells.size()));
        }
        const double t = parse_cell(cells[0], path, row, "t_s");
        const double p = parse_cell(cells[1], path, row, "power_w");
        if (!ts.empty() && t <= ts.back()) {
            throw ValidationError(path.string() + ": row " + std::to_string(row) +
                                  ": timestamp " + format_double(t) +
                                  " does not increase past " + format_double(ts.back()));
        }
        ts.push_back(t);
        vs.push_back(p);
    }
    if (ts.size() < 2) {
        throw FormatError(path.string() + ": need at least 2 data rows, got " +
                          std::to_string(ts.size()));
    }
    const double t0 = ts.front();
    for (double& t : ts) t -= t0; // start-align
    ts.front() = 0.0;
    return TimeSeries(std::move(ts), std::move(vs));
}

std::vector<JointTelemetry> load_telemetry_csv(const fs::path& path, int joint_count) {
    std::ifstream in = open_input(path);
    std::string line;
    bool has_currents = false;
    if (!std::getline(in, line)) {
        throw FormatError(path.string() + ": empty file");
    }
    line = strip_cr(line);
    if (line == kTelemetryHeaderFull) {
        has_currents = true;
    } else if (line != kTelemetryHeaderShort) {
        throw FormatError(path.string() + ": expected header '" +
                          std::string(kTelemetryHeaderShort) + "' or '" +
                          std::string(kTelemetryHeaderFull) + "', got '" + line + "'");
    }

    struct JointRows {
        std::vector<double> ts, torque, velocity, i_target, i_actual, temp;
        size_t last_row = 0;
    };
    std::map<long, JointRows> by_joint;
    size_t row = 1;
    const size_t expected_cols = has_currents ? 7 : 4;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != expected_cols) {
            throw ParseError(path.string() + ": row " + std::to_string(row) +
                             ": expected " + std::to_string(expected_cols) +
                             " columns, got " + std::to_string(cells.size()));
        }
        const double t = parse_cell(cells[0], path, row, "t_s");
        const long joint = parse_int_cell(cells[1], path, row, "joint");
        if (joint < 0 || joint >= joint_count) {
            throw ValidationError(path.string() + ": row " + std::to_string(row) +
                                  ": joint index " + std::to_string(joint) +
                                  " outside 0.." + std::to_string(joint_count - 1));
        }
        auto& jr = by_joint[joint];
        if (!jr.ts.empty() && t <= jr.ts.back()) {
            throw ValidationError(path.string() + ": row " + std::to_string(row) +
                                  ": joint " + std::to_string(joint) + " timestamp " +
                                  format_double(t) + " does not increase past " +
                                  format_double(jr.ts.back()));
        }
        jr.ts.push_back(t);
        jr.torque.push_back(parse_cell(cells[2], path, row, "torque_nm"));
        jr.velocity.push_back(parse_cell(cells[3], path, row, "vel_rad_s"));
        if (has_currents) {
            jr.i_target.push_back(parse_cell(cells[4], path, row, "i_target_a"));
            jr.i_actual.push_back(parse_cell(cells[5], path, row, "i_actual_a"));
            jr.temp.push_back(parse_cell(cells[6], path, row, "temp_c"));
        }
        jr.last_row = row;
    }
    if (by_joint.empty()) {
        throw FormatError(path.string() + ": no data rows");
    }

    size_t common_len = by_joint.begin()->second.ts.size();
    for (const auto& [joint, jr] : by_joint) {
        if (jr.ts.size() != common_len) {
            throw ValidationError(path.string() + ": ragged joint data: joint " +
                                  std::to_string(joint) + " has " +
                                  std::to_string(jr.ts.size()) + " rows, joint " +
                                  std::to_string(by_joint.begin()->first) + " has " +
                                  std::to_string(common_len));
        }
    }

    // Start-align by the file-wide first timestamp so inter-joint offsets
    // survive.
    double t0 = by_joint.begin()->second.ts.front();
    for (const auto& [joint, jr] : by_joint) t0 = std::min(t0, jr.ts.front());

    std::vector<JointTelemetry> result;
    result.reserve(by_joint.size());
    for (auto& [joint, jr] : by_joint) {
        for (double& t : jr.ts) t -= t0;
        JointTelemetry jt{
            .joint_index = static_cast<int>(joint),
            .torque = TimeSeries(jr.ts, std::move(jr.torque)),
            .velocity = TimeSeries(jr.ts, std::move(jr.velocity)),
            .current_target = std::nullopt,
            .current_actual = std::nullopt,
            .temperature = std::nullopt,
        };
        if (has_currents) {
            jt.current_target = TimeSeries(jr.ts, std::move(jr.i_target));
            jt.current_actual = TimeSeries(jr.ts, std::move(jr.i_actual));
            jt.temperature = TimeSeries(jr.ts, std::move(jr.temp));
        }
        validate(jt);
        result.push_back(std::move(jt));
    }
    return result;
}

namespace {

// Tracks which keys of a JSON object were consumed, for unknown-field
// reporting.
class ObjectReader {
public:
    ObjectReader(const ordered_json& obj, std::string where)
        : obj_(obj), where_(std::move(where)) {
        if (!obj.is_object()) {
            throw ParseError(where_ + ": expected a JSON object");
        }
    }

    const ordered_json* optional(const char* key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const ordered_json& required(const char* key) {
        const ordered_json* v = optional(key);
        if (!v) throw ParseError(where_ + ": missing required field '" + key + "'");
        return *v;
    }

    void report_unknown(Warnings* warnings) const {
        if (!warnings) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) {
                warnings->push_back(where_ + ": unknown field '" + it.key() +
                                    "' ignored");
            }
        }
    }

private:
    const ordered_json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

double as_number(const ordered_json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

int as_int(const ordered_json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
    return v.get<int>();
}

bool as_bool(const ordered_json& v, const std::string& where) {
    if (!v.is_boolean()) throw ParseError(where + ": expected a boolean");
    return v.get<bool>();
}

std::string as_string(const ordered_json& v, const std::string& where) {
    if (!v.is_string()) throw ParseError(where + ": expected a string");
    return v.get<std::string>();
}

RobotConstants parse_constants(const ordered_json& j, Warnings* warnings) {
    ObjectReader r(j, "constants");
    RobotConstants c;
    c.electronics_power_w = as_number(r.required("electronics_power_w"),
                                      "constants.electronics_power_w");
    c.brake_power_w = as_number(r.required("brake_power_w"), "constants.brake_power_w");
    c.joint_count = as_int(r.required("joint_count"), "constants.joint_count");
    if (const auto* v = r.optional("delta_potential_j")) {
        c.delta_potential_j = as_number(*v, "constants.delta_potential_j");
    }
    if (const auto* v = r.optional("delta_kinetic_j")) {
        c.delta_kinetic_j = as_number(*v, "constants.delta_kinetic_j");
    }
    r.report_unknown(warnings);
    validate(c);
    return c;
}

FrictionWeighting parse_weighting(const ordered_json& j, const std::string& where,
                                  Warnings* warnings) {
    ObjectReader r(j, where);
    FrictionWeighting w;
    if (const auto* v = r.optional("offset")) w.offset = as_number(*v, where + ".offset");
    if (const auto* v = r.optional("velocity_coeff")) {
        w.velocity_coeff = as_number(*v, where + ".velocity_coeff");
    }
    if (const auto* v = r.optional("temperature_coeff")) {
        w.temperature_coeff = as_number(*v, where + ".temperature_coeff");
    }
    r.report_unknown(warnings);
    return w;
}

WearParams parse_wear(const ordered_json& j, Warnings* warnings) {
    ObjectReader r(j, "wear");
    WearParams params;
    if (const auto* v = r.optional("form")) params.form = as_string(*v, "wear.form");
    const ordered_json& joints = r.required("joints");
    if (!joints.is_array()) throw ParseError("wear.joints: expected an array");
    for (size_t i = 0; i < joints.size(); ++i) {
        const std::string where = "wear.joints[" + std::to_string(i) + "]";
        ObjectReader jr(joints[i], where);
        JointWearParams jp;
        jp.gear_ratio = as_number(jr.required("gear_ratio"), where + ".gear_ratio");
        jp.torque_constant = as_number(jr.required("torque_constant_nm_per_a"),
                                       where + ".torque_constant_nm_per_a");
        jp.max_gear_torque = as_number(jr.required("max_gear_torque_nm"),
                                       where + ".max_gear_torque_nm");
        if (const auto* v = jr.optional("weighting")) {
            jp.weighting = parse_weighting(*v, where + ".weighting", warnings);
        }
        jr.report_unknown(warnings);
        params.joints.push_back(jp);
    }
    r.report_unknown(warnings);
    validate(params);
    return params;
}

} // namespace

ExperimentManifest load_manifest(const fs::path& path, Warnings* warnings) {
    std::ifstream in = open_input(path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    ObjectReader r(j, path.filename().string());
    ExperimentManifest m;
    m.program_id = as_string(r.required("program_id"), "program_id");
    m.condition_id = as_string(r.required("condition_id"), "condition_id");
    m.constants = parse_constants(r.required("constants"), warnings);
    if (const auto* v = r.optional("wear")) {
        m.wear = parse_wear(*v, warnings);
        if (static_cast<int>(m.wear->joints.size()) != m.constants.joint_count) {
            throw ValidationError(path.string() + ": wear.joints has " +
                                  std::to_string(m.wear->joints.size()) +
                                  " entries but joint_count is " +
                                  std::to_string(m.constants.joint_count));
        }
    }

    const ordered_json& runs = r.required("runs");
    if (!runs.is_array()) throw ParseError("runs: expected an array");
    if (runs.empty()) {
        throw ValidationError(path.string() + ": at least one run is required");
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::set<std::string> ids;
    for (size_t i = 0; i < runs.size(); ++i) {
        const std::string where = "runs[" + std::to_string(i) + "]";
        ObjectReader rr(runs[i], where);
        ManifestRun run;
        run.id = as_string(rr.required("id"), where + ".id");
        run.power_file = base / as_string(rr.required("power_file"), where + ".power_file");
        if (const auto* v = rr.optional("telemetry_file")) {
            run.telemetry_file = base / as_string(*v, where + ".telemetry_file");
        }
        run.success = as_bool(rr.required("success"), where + ".success");
        rr.report_unknown(warnings);
        if (!ids.insert(run.id).second) {
            throw ValidationError(path.string() + ": duplicate run id '" + run.id + "'");
        }
        m.runs.push_back(std::move(run));
    }
    r.report_unknown(warnings);

    std::string missing;
    for (const auto& run : m.runs) {
        if (!fs::exists(run.power_file)) {
            missing += "\n  " + run.power_file.string();
        }
        if (run.telemetry_file && !fs::exists(*run.telemetry_file)) {
            missing += "\n  " + run.telemetry_file->string();
        }
    }
    if (!missing.empty()) {
        throw ValidationError(path.string() + ": referenced files do not exist:" +
                              missing);
    }
    return m;
}

LoadedExperiment load_experiment(const fs::path& manifest_path) {
    Warnings warnings;
    ExperimentManifest manifest = load_manifest(manifest_path, &warnings);

    std::vector<Run> runs;
    std::string failures;
    for (const auto& mr : manifest.runs) {
        try {
            Run run{
                .id = mr.id,
                .power = load_power_csv(mr.power_file),
                .joints = {},
                .success = mr.success,
                .metadata = {},
            };
            if (mr.telemetry_file) {
                run.joints =
                    load_telemetry_csv(*mr.telemetry_file, manifest.constants.joint_count);
            }
            validate(run);
            runs.push_back(std::move(run));
        } catch (const Error& e) {
            failures += std::string("\n  run '") + mr.id + "': " + e.what();
        }
    }
    if (!failures.empty()) {
        throw ValidationError(manifest_path.string() + ": " +
                              std::to_string(manifest.runs.size() - runs.size()) +
                              " run(s) failed to load:" + failures);
    }

    ExperimentSet set{
        .program_id = manifest.program_id,
        .condition_id = manifest.condition_id,
        .runs = std::move(runs),
        .constants = manifest.constants,
    };
    validate(set);
    return LoadedExperiment{
        .set = std::move(set),
        .wear = std::move(manifest.wear),
        .warnings = std::move(warnings),
    };
}

void write_power_csv(const fs::path& path, const TimeSeries& series) {
    std::ofstream out = open_output(path);
    out << kPowerHeader << "\n";
    const auto ts = series.timestamps();
    const auto vs = series.values();
    for (size_t i = 0; i < ts.size(); ++i) {
        out << format_double(ts[i]) << ',' << format_double(vs[i]) << "\n";
    }
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_telemetry_csv(const fs::path& path,
                         const std::vector<JointTelemetry>& joints) {
    if (joints.empty()) {
        throw ValidationError("telemetry write: no joints");
    }
    const bool full = joints.front().current_target.has_value();
    for (const auto& j : joints) {
        if (j.current_target.has_value() != full ||
            j.temperature.has_value() != full) {
            throw ValidationError(
                "telemetry write: joints mix optional-channel availability");
        }
    }
    std::ofstream out = open_output(path);
    out << (full ? kTelemetryHeaderFull : kTelemetryHeaderShort) << "\n";
    for (const auto& j : joints) {
        const auto ts = j.torque.timestamps();
        for (size_t i = 0; i < ts.size(); ++i) {
            out << format_double(ts[i]) << ',' << j.joint_index << ','
                << format_double(j.torque.values()[i]) << ','
                << format_double(j.velocity.values()[i]);
            if (full) {
                out << ',' << format_double(j.current_target->values()[i]) << ','
                    << format_double(j.current_actual->values()[i]) << ','
                    << format_double(j.temperature->values()[i]);
            }
            out << "\n";
        }
    }
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_manifest(const fs::path& path, const ExperimentManifest& manifest) {
    ordered_json j;
    j["program_id"] = manifest.program_id;
    j["condition_id"] = manifest.condition_id;
    j["constants"] = {
        {"electronics_power_w", manifest.constants.electronics_power_w},
        {"brake_power_w", manifest.constants.brake_power_w},
        {"joint_count", manifest.constants.joint_count},
        {"delta_potential_j", manifest.constants.delta_potential_j},
        {"delta_kinetic_j", manifest.constants.delta_kinetic_j},
    };
    if (manifest.wear) {
        ordered_json joints = ordered_json::array();
        for (const auto& jp : manifest.wear->joints) {
            joints.push_back({
                {"gear_ratio", jp.gear_ratio},
                {"torque_constant_nm_per_a", jp.torque_constant},
                {"max_gear_torque_nm", jp.max_gear_torque},
                {"weighting",
                 {{"offset", jp.weighting.offset},
                  {"velocity_coeff", jp.weighting.velocity_coeff},
                  {"temperature_coeff", jp.weighting.temperature_coeff}}},
            });
        }
        j["wear"] = {{"form", manifest.wear->form}, {"joints", std::move(joints)}};
    }
    ordered_json runs = ordered_json::array();
    for (const auto& run : manifest.runs) {
        ordered_json r = {
            {"id", run.id},
            {"power_file", run.power_file.filename().string()},
        };
        if (run.telemetry_file) {
            r["telemetry_file"] = run.telemetry_file->filename().string();
        }
        r["success"] = run.success;
        runs.push_back(std::move(r));
    }
    j["runs"] = std::move(runs);

    std::ofstream out = open_output(path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace powerbench
