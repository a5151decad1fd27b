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

#ifndef TWOPATH_GATES_H
#define TWOPATH_GATES_H

#include <functional>

#include "twopath/pulse_engine.h"
#include "twopath/spin_algebra.h"

namespace twopath {

/// Intermediate-state amplitudes alpha = cos(theta/2), beta = sin(theta/2).
struct GateParams {
    double theta = 0;

    double alpha() const;
    double beta() const;
    /// |alpha|^2 / |beta|^2, the population ratio of the two paths.
    double population_ratio() const;
};

struct UPulseAngles {
    double theta1 = 0;
    double theta2 = 0;
};

/// R1 on spin b: [[alpha, -beta], [beta, alpha]].
Operator4 r1_gate(double theta);

/// Controlled-NOT, control b, target a.
Operator4 cnot_ideal();

/// cnot_ideal() * r1_gate(theta).
Operator4 r2_gate(double theta);

/// U(phi) on spin b: (1/sqrt2) [[1, e^{i phi}], [-e^{-i phi}, 1]].
Operator4 u_gate_ideal(double phi);

/// theta1 = atan(-sin phi), theta2 = 2 asin(-cos phi / sqrt2).
UPulseAngles u_pulse_angles(double phi);

/// (theta)_{-y} on spin b, axis label passed through the label map.
PulseSequence r1_pulse_sequence(double theta, AxisConvention convention = kDefaultAxisConvention);

/// (pi/2)^a_{-y}, 1/(2J), (pi/2)^{ab}_{y}, (pi/2)^{ab}_{-x}, (pi/2)^b_{-y}.
PulseSequence cnot_pulse_sequence(const SpinSystem& system,
                                  AxisConvention convention = kDefaultAxisConvention);

/// (theta1)_x (theta2)_y (theta1)_x on spin b. Axes are simulator axes:
/// the propagator is exp(-i Ix theta1) exp(-i Iy theta2) exp(-i Ix theta1).
PulseSequence u_pulse_sequence(double phi);
PulseSequence u_pulse_sequence(const UPulseAngles& angles);

/// (pi/2)^a_y then (pi/2)^b_y, labels mapped.
PulseSequence readout_sequence(AxisConvention convention = kDefaultAxisConvention);

/// Diagonal-phase comparison of the compiled CNOT sequence with cnot_ideal().
DiagonalPhaseMatch verify_cnot_sequence(const SpinSystem& system,
                                        AxisConvention convention = kDefaultAxisConvention);

/// diag(e^{-i phase_k}); applied before the CNOT sequence it cancels the
/// recorded phases so that sequence * correction = cnot_ideal() within the
/// match distance.
Operator4 phase_correction(const DiagonalPhaseMatch& match);

struct USweepResult {
    double max_distance = 0;
    double worst_phi = 0;
    int points = 0;
};

using AngleRule = std::function<UPulseAngles(double)>;

/// Compares the compiled three-pulse U sequence with u_gate_ideal over
/// `points` uniform phases covering [0, 2 pi] inclusive.
USweepResult verify_u_sequence(int points = 721, const AngleRule& rule = u_pulse_angles);

}  // namespace twopath

#endif  // TWOPATH_GATES_H
