#pragma once

#include <optional>

#include "powerbench/model.hpp"

namespace powerbench {

/// Per-run energy quantities. The mechanical pair is unset when the run
/// carries no joint telemetry.
struct EnergyResult {
    double basal_energy_j = 0.0;  // E_B
    double actual_energy_j = 0.0; // E_R
    double utilization = 0.0;     // f_U = E_B / E_R
    std::optional<double> positive_mech_energy_j; // E_MP
    std::optional<double> conversion;             // f_C = E_MP / E_R
};

/// Basal (loss-free) energy: (P_E + P_MB) * T + dE_pot + dE_kin.
/// Zero is allowed but flagged degenerate via `warnings`; a negative result
/// throws DomainError since the utilization ratio would lose meaning.
double basal_energy(const RobotConstants& constants, double duration_s,
                    Warnings* warnings = nullptr);

/// Measured energy: trapezoidal integral of the power profile.
/// Throws ValidationError when the integral is not positive (miswired or
/// inverted power channel).
double actual_energy(const Run& run);

/// f_U = basal / actual. Reported unclamped; values above 1 indicate a
/// calibration/sensor inconsistency and are surfaced as a warning.
double utilization_coefficient(double basal_j, double actual_j,
                               Warnings* warnings = nullptr);

/// Pointwise torque*velocity clipped below at zero (regenerative power is
/// dissipated resistively and excluded).
TimeSeries positive_mechanical_power(const JointTelemetry& joint);

/// Sum over joints of the integral of clipped mechanical power.
double positive_mechanical_energy(const std::vector<JointTelemetry>& joints);

/// f_C = E_MP / E_R. Warns when above 1.
double conversion_coefficient(double positive_mech_j, double actual_j,
                              Warnings* warnings = nullptr);

/// Full per-run evaluation.
EnergyResult evaluate_energy(const Run& run, const RobotConstants& constants,
                             Warnings* warnings = nullptr);

/// Means over successful runs only; per-run values retained for
/// distribution reporting. Mechanical means cover the successful runs that
/// carry telemetry and are unset when none do.
struct EnergyAggregate {
    std::vector<EnergyResult> per_run; // aligned with set.runs
    EnergyResult mean;
    Warnings warnings;
};

/// Throws DomainError("no successful runs") when every run failed.
EnergyAggregate aggregate_energy(const ExperimentSet& set);

} // namespace powerbench
