// Copyright 2026 The twopath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWOPATH_STATE_PREP_H
#define TWOPATH_STATE_PREP_H

#include <string>

#include "twopath/pulse_engine.h"
#include "twopath/spin_algebra.h"

namespace twopath {

/// Nuclear Zeeman polarizations in the high-temperature limit. The default
/// ratio eps_a / eps_b = 3.977 is gamma_H / gamma_C.
struct ThermalParams {
    double eps_b = 0.01;
    double eps_a = 0.03977;

    /// Throws std::invalid_argument unless |eps_a| + |eps_b| < 1.
    void validate() const;
};

/// rho = A E + B |00><00| with 4A + B = 1.
struct EffectivePureParams {
    double a = 0;
    double b = 1;

    /// Throws std::invalid_argument for negative values or 4A + B != 1.
    void validate() const;
};

DensityMatrix4 effective_pure(const EffectivePureParams& params);

/// E/4 + eps_b Iz^b + eps_a Iz^a.
DensityMatrix4 thermal_state(const ThermalParams& params);

/// Flip angles of the two transition-selective preparation pulses.
struct PrepAngles {
    /// Pulse on the |10>-|11> transition (spin a with b = 1).
    double angle1 = 0;
    /// Pulse on the |01>-|11> transition (spin b with a = 1).
    double angle2 = 0;
};

struct PrepSolution {
    PrepAngles angles;
    /// max(|p01 - p11|, |p10 - p11|) after preparation.
    double residual = 0;
    EffectivePureParams state;
};

/// tsel(2,3) angle1, tsel(1,3) angle2, crush.
PulseSequence prep_sequence(const PrepAngles& angles);

/// Grid search over [0, pi]^2 refined by damped Newton steps. Throws
/// DegenerateInput when both polarizations vanish and NoSolution when the
/// residual stays above 1e-9.
PrepSolution solve_prep_angles(const ThermalParams& thermal);

DensityMatrix4 prepare(const ThermalParams& thermal, const PrepAngles& angles,
                       InvariantTracker* tracker = nullptr);
/// Same as above with an RF flip-angle scale applied to both pulses.
DensityMatrix4 prepare(const ThermalParams& thermal, const PrepAngles& angles, double rf_scale,
                       InvariantTracker* tracker = nullptr);

/// Reads (A, B) off a state of the form A E + B |00><00|: A is the mean of
/// the three non-|00> populations and B = p00 - A.
EffectivePureParams infer_effective_pure(const DensityMatrix4& rho);

/// Two-line human-readable report.
std::string format_prep_report(const PrepSolution& solution);

}  // namespace twopath

#endif  // TWOPATH_STATE_PREP_H
