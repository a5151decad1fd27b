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

#ifndef TWOPATH_PULSE_ENGINE_H
#define TWOPATH_PULSE_ENGINE_H

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twopath/spin_algebra.h"

namespace twopath {

/// Heteronuclear two-spin system in the doubly rotating frame.
struct SpinSystem {
    double j_coupling_hz = 215.0;
    double freq_b_mhz = 125.0;
    double freq_a_mhz = 500.0;

    /// Throws std::invalid_argument unless all quantities are positive.
    void validate() const;
};

enum class Axis { kPlusX, kMinusX, kPlusY, kMinusY };

struct Targets {
    bool b = false;
    bool a = false;

    static constexpr Targets spin_b() { return {true, false}; }
    static constexpr Targets spin_a() { return {false, true}; }
    static constexpr Targets both() { return {true, true}; }
    bool operator==(const Targets&) const = default;
};

struct RfPulse {
    Targets targets;
    Axis axis = Axis::kPlusX;
    double flip_angle = 0;
    bool operator==(const RfPulse&) const = default;
};

struct Delay {
    double duration = 0;
    bool operator==(const Delay&) const = default;
};

struct GradientCrusher {
    bool operator==(const GradientCrusher&) const = default;
};

/// Rotation confined to the two-level subspace spanned by two basis states.
struct TransitionPulse {
    std::array<int, 2> pair{0, 1};
    Axis axis = Axis::kPlusY;
    double flip_angle = 0;
    bool operator==(const TransitionPulse&) const = default;
};

using PulseEvent = std::variant<RfPulse, Delay, GradientCrusher, TransitionPulse>;

/// Events in chronological order: events.front() is applied first.
struct PulseSequence {
    std::vector<PulseEvent> events;

    PulseSequence& then(PulseEvent e) {
        events.push_back(std::move(e));
        return *this;
    }
    bool operator==(const PulseSequence&) const = default;
};

/// How axis labels written in the literature map onto simulator axes. The
/// simulator's pulse about n is exp(-i angle (I . n)); kFlipped reverses
/// every label, which is what makes "(theta) about -y" equal the rotation
/// matrix [[cos, -sin], [sin, cos]] of half-angles.
enum class AxisConvention { kFlipped, kDirect };

inline constexpr AxisConvention kDefaultAxisConvention = AxisConvention::kFlipped;

Axis map_axis_label(Axis label, AxisConvention convention = kDefaultAxisConvention);
Axis opposite(Axis axis);

std::string_view axis_token(Axis axis);

/// Single-spin block exp(-i angle (I . n)).
Operator2 axis_rotation(Axis axis, double angle);

Operator4 rf_propagator(Targets targets, Axis axis, double flip_angle);

/// exp(-i 2 pi J t Iz⊗Iz); only the J term evolves in the rotating frame.
Operator4 j_propagator(double duration, const SpinSystem& system);

/// Idealized gradient: zeroes every off-diagonal element.
DensityMatrix4 crusher(const DensityMatrix4& rho);

/// Throws std::invalid_argument for equal or out-of-range indices.
Operator4 transition_propagator(std::array<int, 2> pair, Axis axis, double flip_angle);

/// Throws NonUnitarySequence for a crusher.
Operator4 event_propagator(const PulseEvent& event, const SpinSystem& system);

/// Validates event fields (finite angles, non-negative delays, valid pairs).
void validate_event(const PulseEvent& event);

DensityMatrix4 run_sequence(const PulseSequence& seq, const DensityMatrix4& rho0,
                            const SpinSystem& system, InvariantTracker* tracker = nullptr);

/// Product of event propagators in reverse order (last event leftmost).
/// Throws NonUnitarySequence when a crusher is present and
/// std::invalid_argument for an empty sequence.
Operator4 compile_unitary(const PulseSequence& seq, const SpinSystem& system);

/// Multiplies every RF and transition flip angle by factor.
PulseSequence scale_flip_angles(const PulseSequence& seq, double factor);

/// Line-oriented text form, one event per line:
///   rf b +y 1.5707963267948966
///   delay 0.0023255813953488372
///   crush
///   tsel 2 3 +y 3.141592653589793
std::string to_text(const PulseSequence& seq);

/// Inverse of to_text. Blank lines and '#' comments are skipped. Throws
/// ParseError naming the offending line.
PulseSequence parse_sequence(std::string_view text);

}  // namespace twopath

#endif  // TWOPATH_PULSE_ENGINE_H
