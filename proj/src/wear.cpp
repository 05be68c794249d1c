#include "powerbench/wear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "powerbench/numeric.hpp"

namespace powerbench {

namespace {

std::mutex registry_mutex;

std::map<std::string, AlphaForm>& registry() {
    static std::map<std::string, AlphaForm> forms = {
        {"normalized-product",
         [](double jsf, double omega, const JointWearParams& j) {
             return jsf * omega * j.torque_constant * j.gear_ratio / j.max_gear_torque;
         }},
    };
    return forms;
}

} // namespace

void validate(const WearParams& params) {
    if (params.joints.empty()) {
        throw ConfigError("wear params: no joints configured");
    }
    for (size_t i = 0; i < params.joints.size(); ++i) {
        const auto& j = params.joints[i];
        if (!(j.max_gear_torque > 0)) {
            throw ConfigError("wear params: joint " + std::to_string(i) +
                              " max gear torque must be positive, got " +
                              format_double(j.max_gear_torque));
        }
        if (!(j.gear_ratio > 0)) {
            throw ConfigError("wear params: joint " + std::to_string(i) +
                              " gear ratio must be positive, got " +
                              format_double(j.gear_ratio));
        }
    }
    alpha_form(params.form); // must resolve
}

void register_alpha_form(const std::string& name, AlphaForm form) {
    std::lock_guard lock(registry_mutex);
    registry()[name] = std::move(form);
}

AlphaForm alpha_form(const std::string& name) {
    std::lock_guard lock(registry_mutex);
    auto it = registry().find(name);
    if (it == registry().end()) {
        throw ConfigError("unknown stress form '" + name + "'");
    }
    return it->second;
}

TimeSeries joint_signal_flux(const JointTelemetry& joint) {
    if (!joint.current_target || !joint.current_actual) {
        throw WearUnavailableError("joint " + std::to_string(joint.joint_index) +
                                   ": wear unavailable, current channels missing");
    }
    validate(joint);
    const auto ts = joint.current_target->timestamps();
    const auto target = joint.current_target->values();
    const auto actual = joint.current_actual->values();
    std::vector<double> flux(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        flux[i] = std::abs(target[i] - actual[i]);
    }
    return TimeSeries(std::vector<double>(ts.begin(), ts.end()), std::move(flux));
}

TimeSeries alpha_series(const TimeSeries& jsf, const JointTelemetry& joint,
                        const JointWearParams& params, const AlphaForm& form) {
    if (!(params.max_gear_torque > 0)) {
        throw ConfigError("joint " + std::to_string(joint.joint_index) +
                          ": max gear torque must be positive, got " +
                          format_double(params.max_gear_torque));
    }
    const bool needs_temperature = params.weighting.temperature_coeff != 0.0;
    if (needs_temperature && !joint.temperature) {
        throw ConfigError("joint " + std::to_string(joint.joint_index) +
                          ": weighting uses temperature but the channel is missing");
    }
    const auto ts = jsf.timestamps();
    const auto flux = jsf.values();
    std::vector<double> alpha(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        const double vel = joint.velocity.value_at_clamped(ts[i]);
        const double temp =
            joint.temperature ? joint.temperature->value_at_clamped(ts[i]) : 0.0;
        const double omega = params.weighting(vel, temp);
        if (!(omega > 0)) {
            throw ConfigError("joint " + std::to_string(joint.joint_index) +
                              ": friction weighting evaluates to " +
                              format_double(omega) + " at t=" + format_double(ts[i]) +
                              " s; must stay positive");
        }
        alpha[i] = form(flux[i], omega, params);
    }
    return TimeSeries(std::vector<double>(ts.begin(), ts.end()), std::move(alpha));
}

WearResult alpha_stress(const ExperimentSet& set, const WearParams& params) {
    validate(set);
    validate(params);
    const AlphaForm form = alpha_form(params.form);

    std::string missing;
    for (const auto& run : set.runs) {
        bool ok = run.has_telemetry();
        for (const auto& joint : run.joints) {
            ok = ok && joint.current_target && joint.current_actual;
        }
        if (!ok) missing += missing.empty() ? run.id : ", " + run.id;
    }
    if (!missing.empty()) {
        throw WearUnavailableError("wear unavailable, runs missing current data: " +
                                   missing);
    }

    WearResult result;
    result.form = params.form;
    const size_t n_runs = set.runs.size();
    for (const auto& run : set.runs) {
        std::vector<TimeSeries> per_joint_alpha;
        std::vector<double> per_joint_peak;
        for (const auto& joint : run.joints) {
            if (joint.joint_index >= static_cast<int>(params.joints.size())) {
                throw ConfigError("run '" + run.id + "': no wear calibration for joint " +
                                  std::to_string(joint.joint_index));
            }
            const auto& jp = params.joints[static_cast<size_t>(joint.joint_index)];
            TimeSeries a = alpha_series(joint_signal_flux(joint), joint, jp, form);
            per_joint_peak.push_back(
                *std::max_element(a.values().begin(), a.values().end()));
            per_joint_alpha.push_back(std::move(a));
        }
        result.alpha.push_back(std::move(per_joint_alpha));
        result.peak.push_back(std::move(per_joint_peak));
    }

    const size_t n_joints = result.peak.front().size();
    for (const auto& peaks : result.peak) {
        if (peaks.size() != n_joints) {
            throw ValidationError("runs disagree on the set of joints with telemetry");
        }
    }

    // Per joint: mean of per-run maxima; then accumulate over joints.
    std::vector<double> joint_means;
    joint_means.reserve(n_joints);
    for (size_t j = 0; j < n_joints; ++j) {
        std::vector<double> maxima;
        maxima.reserve(n_runs);
        for (size_t r = 0; r < n_runs; ++r) {
            maxima.push_back(result.peak[r][j]);
        }
        joint_means.push_back(sorted_sum(std::move(maxima)) /
                              static_cast<double>(n_runs));
    }
    result.alpha_stress = sorted_sum(std::move(joint_means));
    return result;
}

} // namespace powerbench
