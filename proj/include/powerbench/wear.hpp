#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "powerbench/model.hpp"

namespace powerbench {

/// Affine friction weighting: omega(vel, temp) = offset + v*|vel| + t*temp.
/// Defaults to the neutral element (omega == 1); calibration is
/// site-specific.
struct FrictionWeighting {
    double offset = 1.0;
    double velocity_coeff = 0.0;    // per rad/s
    double temperature_coeff = 0.0; // per degC

    double operator()(double velocity_rad_s, double temperature_c) const {
        return offset + velocity_coeff * std::abs(velocity_rad_s) +
               temperature_coeff * temperature_c;
    }
};

/// Calibration constants of one joint's gear train.
struct JointWearParams {
    double gear_ratio = 0.0;          // phi, teeth count
    double torque_constant = 0.0;     // tau_k, N*m/A
    double max_gear_torque = 0.0;     // tau_max, N*m
    FrictionWeighting weighting;
};

/// Per-joint calibration plus the identifier of the standardization form.
/// `joints` is indexed by joint_index.
struct WearParams {
    std::vector<JointWearParams> joints;
    std::string form = "normalized-product";
};

/// Throws ConfigError on non-positive gear ratio or max torque.
void validate(const WearParams& params);

/// Standardization applied sample-by-sample: maps (JSF, omega, joint
/// calibration) to a dimensionless stress value.
using AlphaForm = std::function<double(double jsf_a, double omega,
                                       const JointWearParams& joint)>;

/// Registers a stress form under a name; replaces an existing entry.
void register_alpha_form(const std::string& name, AlphaForm form);

/// Throws ConfigError for an unknown name. "normalized-product" is built in:
/// alpha = jsf * omega * torque_constant * gear_ratio / max_gear_torque.
AlphaForm alpha_form(const std::string& name);

/// Joint Signal Flux: |target current - actual current| per sample.
/// Throws WearUnavailableError when either current channel is missing.
TimeSeries joint_signal_flux(const JointTelemetry& joint);

/// Stress series of one joint: form(jsf(t), omega(vel(t), temp(t))).
/// Velocity/temperature are sampled onto the JSF grid with edge clamping;
/// a missing temperature channel requires temperature_coeff == 0.
/// Throws ConfigError when omega evaluates non-positive.
TimeSeries alpha_series(const TimeSeries& jsf, const JointTelemetry& joint,
                        const JointWearParams& params,
                        const AlphaForm& form);

/// Program-level wear: per-run, per-joint stress maximum, averaged over
/// runs, accumulated over joints.
struct WearResult {
    /// alpha_series[run][joint], aligned with set.runs and joint order.
    std::vector<std::vector<TimeSeries>> alpha;
    /// Per-run, per-joint stress extrema.
    std::vector<std::vector<double>> peak; // [run][joint]
    double alpha_stress = 0.0;             // alpha_S
    std::string form;
};

/// Throws WearUnavailableError listing every run that lacks current data.
WearResult alpha_stress(const ExperimentSet& set, const WearParams& params);

} // namespace powerbench
