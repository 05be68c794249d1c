#include "powerbench/energy.hpp"

#include <algorithm>
#include <cmath>

#include "powerbench/numeric.hpp"

namespace powerbench {

namespace {

void warn(Warnings* sink, const std::string& msg) {
    if (sink) sink->push_back(msg);
}

} // namespace

double basal_energy(const RobotConstants& constants, double duration_s,
                    Warnings* warnings) {
    if (!(duration_s > 0)) {
        throw DomainError("basal energy: duration must be positive, got " +
                          format_double(duration_s));
    }
    const double e =
        (constants.electronics_power_w + constants.brake_power_w) * duration_s +
        constants.delta_potential_j + constants.delta_kinetic_j;
    if (e < 0) {
        throw DomainError("basal energy is negative (" + format_double(e) +
                          " J); check the delta energy terms");
    }
    if (e == 0) {
        warn(warnings, "basal energy is zero (degenerate constants); "
                       "utilization is undefined");
    }
    return e;
}

double actual_energy(const Run& run) {
    const double e = integrate(run.power);
    if (!(e > 0)) {
        throw ValidationError("run '" + run.id + "': measured energy " +
                              format_double(e) +
                              " J is not positive; power channel looks miswired");
    }
    return e;
}

double utilization_coefficient(double basal_j, double actual_j, Warnings* warnings) {
    if (!(basal_j > 0)) {
        throw DomainError("utilization: basal energy must be positive, got " +
                          format_double(basal_j));
    }
    if (!(actual_j > 0)) {
        throw DomainError("utilization: actual energy must be positive, got " +
                          format_double(actual_j));
    }
    const double f = basal_j / actual_j;
    if (f > 1.0) {
        warn(warnings, "utilization " + format_double(f) +
                           " exceeds 1; basal constants and the power channel "
                           "are inconsistent");
    }
    return f;
}

TimeSeries positive_mechanical_power(const JointTelemetry& joint) {
    validate(joint);
    const auto ts = joint.torque.timestamps();
    const auto tau = joint.torque.values();
    const auto vel = joint.velocity.values();
    std::vector<double> clipped(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        clipped[i] = std::max(tau[i] * vel[i], 0.0);
    }
    return TimeSeries(std::vector<double>(ts.begin(), ts.end()), std::move(clipped));
}

double positive_mechanical_energy(const std::vector<JointTelemetry>& joints) {
    if (joints.empty()) {
        throw DomainError("positive mechanical energy: at least one joint required");
    }
    std::vector<double> per_joint;
    per_joint.reserve(joints.size());
    for (const auto& joint : joints) {
        per_joint.push_back(integrate(positive_mechanical_power(joint)));
    }
    return sorted_sum(std::move(per_joint));
}

double conversion_coefficient(double positive_mech_j, double actual_j,
                              Warnings* warnings) {
    if (!(actual_j > 0)) {
        throw DomainError("conversion: actual energy must be positive, got " +
                          format_double(actual_j));
    }
    if (positive_mech_j < 0) {
        throw DomainError("conversion: mechanical energy must be >= 0, got " +
                          format_double(positive_mech_j));
    }
    const double f = positive_mech_j / actual_j;
    if (f > 1.0) {
        warn(warnings, "conversion " + format_double(f) +
                           " exceeds 1; torque/velocity channels are inconsistent "
                           "with the power channel");
    }
    return f;
}

EnergyResult evaluate_energy(const Run& run, const RobotConstants& constants,
                             Warnings* warnings) {
    EnergyResult r;
    r.basal_energy_j = basal_energy(constants, run.duration(), warnings);
    r.actual_energy_j = actual_energy(run);
    r.utilization = utilization_coefficient(r.basal_energy_j, r.actual_energy_j, warnings);
    if (run.has_telemetry()) {
        r.positive_mech_energy_j = positive_mechanical_energy(run.joints);
        r.conversion =
            conversion_coefficient(*r.positive_mech_energy_j, r.actual_energy_j, warnings);
    }
    return r;
}

EnergyAggregate aggregate_energy(const ExperimentSet& set) {
    validate(set);
    EnergyAggregate agg;
    agg.per_run.reserve(set.runs.size());
    for (const auto& run : set.runs) {
        Warnings w;
        agg.per_run.push_back(evaluate_energy(run, set.constants, &w));
        for (auto& msg : w) agg.warnings.push_back("run '" + run.id + "': " + msg);
    }

    std::vector<double> basal, actual, util, mech, conv;
    size_t successes = 0;
    size_t success_without_telemetry = 0;
    for (size_t i = 0; i < set.runs.size(); ++i) {
        if (!set.runs[i].success) continue;
        ++successes;
        const auto& r = agg.per_run[i];
        basal.push_back(r.basal_energy_j);
        actual.push_back(r.actual_energy_j);
        util.push_back(r.utilization);
        if (r.positive_mech_energy_j) {
            mech.push_back(*r.positive_mech_energy_j);
            conv.push_back(*r.conversion);
        } else {
            ++success_without_telemetry;
        }
    }
    if (successes == 0) {
        throw DomainError("no successful runs; energy means are undefined");
    }

    agg.mean.basal_energy_j = sorted_mean(std::move(basal));
    agg.mean.actual_energy_j = sorted_mean(std::move(actual));
    agg.mean.utilization = sorted_mean(std::move(util));
    if (!mech.empty()) {
        if (success_without_telemetry > 0) {
            agg.warnings.push_back(
                std::to_string(success_without_telemetry) +
                " successful run(s) lack telemetry; mechanical means cover the rest");
        }
        agg.mean.positive_mech_energy_j = sorted_mean(std::move(mech));
        agg.mean.conversion = sorted_mean(std::move(conv));
    }
    return agg;
}

} // namespace powerbench
