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

#include "twopath/gates.h"

#include <cmath>
#include <numbers>

namespace twopath {

using std::numbers::pi;

double GateParams::alpha() const { return std::cos(theta / 2); }
double GateParams::beta() const { return std::sin(theta / 2); }
double GateParams::population_ratio() const {
    const double a = alpha();
    const double b = beta();
    return (a * a) / (b * b);
}

Operator4 r1_gate(double theta) {
    const GateParams g{theta};
    Operator2 r;
    r.m << g.alpha(), -g.beta(), g.beta(), g.alpha();
    return on_spin_b(r);
}

Operator4 cnot_ideal() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(3, 2) = 1;
    m(2, 3) = 1;
    return Operator4::unitary(m);
}

Operator4 r2_gate(double theta) { return cnot_ideal() * r1_gate(theta); }

Operator4 u_gate_ideal(double phi) {
    const Complex e = std::polar(1.0, phi);
    Operator2 u;
    u.m << 1.0, e, -std::conj(e), 1.0;
    u.m /= std::sqrt(2.0);
    return on_spin_b(u);
}

UPulseAngles u_pulse_angles(double phi) {
    return {std::atan(-std::sin(phi)), 2 * std::asin(-std::cos(phi) / std::sqrt(2.0))};
}

PulseSequence r1_pulse_sequence(double theta, AxisConvention convention) {
    PulseSequence seq;
    seq.then(RfPulse{Targets::spin_b(), map_axis_label(Axis::kMinusY, convention), theta});
    return seq;
}

PulseSequence cnot_pulse_sequence(const SpinSystem& system, AxisConvention convention) {
    system.validate();
    const auto label = [&](Axis a) { return map_axis_label(a, convention); };
    PulseSequence seq;
    seq.then(RfPulse{Targets::spin_a(), label(Axis::kMinusY), pi / 2})
        .then(Delay{1 / (2 * system.j_coupling_hz)})
        .then(RfPulse{Targets::both(), label(Axis::kPlusY), pi / 2})
        .then(RfPulse{Targets::both(), label(Axis::kMinusX), pi / 2})
        .then(RfPulse{Targets::spin_b(), label(Axis::kMinusY), pi / 2});
    return seq;
}

PulseSequence u_pulse_sequence(const UPulseAngles& angles) {
    PulseSequence seq;
    seq.then(RfPulse{Targets::spin_b(), Axis::kPlusX, angles.theta1})
        .then(RfPulse{Targets::spin_b(), Axis::kPlusY, angles.theta2})
        .then(RfPulse{Targets::spin_b(), Axis::kPlusX, angles.theta1});
    return seq;
}

PulseSequence u_pulse_sequence(double phi) { return u_pulse_sequence(u_pulse_angles(phi)); }

PulseSequence readout_sequence(AxisConvention convention) {
    PulseSequence seq;
    seq.then(RfPulse{Targets::spin_a(), map_axis_label(Axis::kPlusY, convention), pi / 2})
        .then(RfPulse{Targets::spin_b(), map_axis_label(Axis::kPlusY, convention), pi / 2});
    return seq;
}

DiagonalPhaseMatch verify_cnot_sequence(const SpinSystem& system, AxisConvention convention) {
    return distance_up_to_diagonal_phase(compile_unitary(cnot_pulse_sequence(system, convention), system),
                                         cnot_ideal());
}

Operator4 phase_correction(const DiagonalPhaseMatch& match) {
    Mat4 d = Mat4::Zero();
    for (int k = 0; k < 4; ++k) {
        d(k, k) = std::polar(1.0, -match.phases[k]);
    }
    return Operator4::unitary(d);
}

USweepResult verify_u_sequence(int points, const AngleRule& rule) {
    USweepResult out;
    out.points = points;
    const SpinSystem system;
    for (int k = 0; k < points; ++k) {
        const double phi = points == 1 ? 0.0 : 2 * pi * k / (points - 1);
        const Operator4 compiled = compile_unitary(u_pulse_sequence(rule(phi)), system);
        const double d = distance_up_to_global_phase(compiled, u_gate_ideal(phi));
        if (d > out.max_distance || k == 0) {
            out.max_distance = d;
            out.worst_phi = phi;
        }
    }
    return out;
}

}  // namespace twopath
