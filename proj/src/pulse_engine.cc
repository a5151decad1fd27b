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

#include "twopath/pulse_engine.h"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "twopath/errors.h"

namespace twopath {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

double parse_double(std::string_view token, int line_no) {
    double x = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(x)) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(token) + "'");
    }
    return x;
}

int parse_index(std::string_view token, int line_no) {
    int x = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad index '" + std::string(token) + "'");
    }
    return x;
}

Axis parse_axis(std::string_view token, int line_no) {
    if (token == "+x") return Axis::kPlusX;
    if (token == "-x") return Axis::kMinusX;
    if (token == "+y") return Axis::kPlusY;
    if (token == "-y") return Axis::kMinusY;
    throw ParseError("line " + std::to_string(line_no) + ": bad axis '" + std::string(token) + "'");
}

std::string_view targets_token(Targets t) {
    if (t.a && t.b) return "ab";
    if (t.b) return "b";
    if (t.a) return "a";
    return "-";
}

Targets parse_targets(std::string_view token, int line_no) {
    if (token == "b") return Targets::spin_b();
    if (token == "a") return Targets::spin_a();
    if (token == "ab" || token == "ba") return Targets::both();
    throw ParseError("line " + std::to_string(line_no) + ": bad targets '" + std::string(token) + "'");
}

void check_pair(std::array<int, 2> pair) {
    if (pair[0] == pair[1] || pair[0] < 0 || pair[0] > 3 || pair[1] < 0 || pair[1] > 3) {
        throw std::invalid_argument("transition pair must be two distinct indices in 0..3");
    }
}

}  // namespace

void SpinSystem::validate() const {
    if (!(j_coupling_hz > 0) || !(freq_b_mhz > 0) || !(freq_a_mhz > 0)) {
        throw std::invalid_argument("spin system coupling and frequencies must be positive");
    }
}

Axis opposite(Axis axis) {
    switch (axis) {
        case Axis::kPlusX: return Axis::kMinusX;
        case Axis::kMinusX: return Axis::kPlusX;
        case Axis::kPlusY: return Axis::kMinusY;
        case Axis::kMinusY: return Axis::kPlusY;
    }
    throw std::invalid_argument("unknown axis");
}

Axis map_axis_label(Axis label, AxisConvention convention) {
    return convention == AxisConvention::kFlipped ? opposite(label) : label;
}

std::string_view axis_token(Axis axis) {
    switch (axis) {
        case Axis::kPlusX: return "+x";
        case Axis::kMinusX: return "-x";
        case Axis::kPlusY: return "+y";
        case Axis::kMinusY: return "-y";
    }
    return "?";
}

Operator2 axis_rotation(Axis axis, double angle) {
    switch (axis) {
        case Axis::kPlusX: return spin_rotation(1, 0, 0, angle);
        case Axis::kMinusX: return spin_rotation(-1, 0, 0, angle);
        case Axis::kPlusY: return spin_rotation(0, 1, 0, angle);
        case Axis::kMinusY: return spin_rotation(0, -1, 0, angle);
    }
    throw std::invalid_argument("unknown axis");
}

Operator4 rf_propagator(Targets targets, Axis axis, double flip_angle) {
    const Operator2 r = axis_rotation(axis, flip_angle);
    const Operator2 id;
    return kron(targets.b ? r : id, targets.a ? r : id);
}

Operator4 j_propagator(double duration, const SpinSystem& system) {
    if (!(duration >= 0)) {
        throw std::invalid_argument("delay duration must be non-negative");
    }
    // Iz⊗Iz = diag(1/4, -1/4, -1/4, 1/4)
    const double w = 2 * std::numbers::pi * system.j_coupling_hz;
    const Eigen::Vector4d generator(w / 4, -w / 4, -w / 4, w / 4);
    return exp_diagonal(generator, duration);
}

DensityMatrix4 crusher(const DensityMatrix4& rho) {
    Mat4 out = Mat4::Zero();
    for (int k = 0; k < 4; ++k) {
        out(k, k) = rho(k, k);
    }
    return DensityMatrix4(out);
}

Operator4 transition_propagator(std::array<int, 2> pair, Axis axis, double flip_angle) {
    check_pair(pair);
    const Operator2 r = axis_rotation(axis, flip_angle);
    Mat4 m = Mat4::Identity();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m(pair[i], pair[j]) = r.m(i, j);
        }
    }
    return Operator4::unitary(m);
}

void validate_event(const PulseEvent& event) {
    std::visit(Overloaded{
                   [](const RfPulse& p) {
                       if (!std::isfinite(p.flip_angle)) throw std::invalid_argument("flip angle must be finite");
                   },
                   [](const Delay& d) {
                       if (!(d.duration >= 0) || !std::isfinite(d.duration)) {
                           throw std::invalid_argument("delay duration must be finite and non-negative");
                       }
                   },
                   [](const GradientCrusher&) {},
                   [](const TransitionPulse& t) {
                       check_pair(t.pair);
                       if (!std::isfinite(t.flip_angle)) throw std::invalid_argument("flip angle must be finite");
                   },
               },
               event);
}

Operator4 event_propagator(const PulseEvent& event, const SpinSystem& system) {
    validate_event(event);
    return std::visit(Overloaded{
                          [](const RfPulse& p) { return rf_propagator(p.targets, p.axis, p.flip_angle); },
                          [&](const Delay& d) { return j_propagator(d.duration, system); },
                          [](const GradientCrusher&) -> Operator4 {
                              throw NonUnitarySequence("gradient crusher has no unitary propagator");
                          },
                          [](const TransitionPulse& t) {
                              return transition_propagator(t.pair, t.axis, t.flip_angle);
                          },
                      },
                      event);
}

DensityMatrix4 run_sequence(const PulseSequence& seq, const DensityMatrix4& rho0, const SpinSystem& system,
                            InvariantTracker* tracker) {
    DensityMatrix4 rho = rho0;
    for (const PulseEvent& e : seq.events) {
        if (std::holds_alternative<GradientCrusher>(e)) {
            rho = crusher(rho);
        } else {
            const Operator4 u = event_propagator(e, system);
            if (tracker) tracker->observe(u);
            rho = apply_unitary(u, rho);
        }
        if (tracker) tracker->observe(rho);
    }
    return rho;
}

Operator4 compile_unitary(const PulseSequence& seq, const SpinSystem& system) {
    if (seq.events.empty()) {
        throw std::invalid_argument("cannot compile an empty pulse sequence");
    }
    Operator4 total;
    for (const PulseEvent& e : seq.events) {
        if (std::holds_alternative<GradientCrusher>(e)) {
            throw NonUnitarySequence("sequence contains a gradient crusher");
        }
        total = event_propagator(e, system) * total;
    }
    if (!total.is_flagged_unitary()) {
        throw NonUnitaryOperator("compiled sequence drifted from unitarity");
    }
    return total;
}

PulseSequence scale_flip_angles(const PulseSequence& seq, double factor) {
    PulseSequence out = seq;
    for (PulseEvent& e : out.events) {
        if (auto* p = std::get_if<RfPulse>(&e)) p->flip_angle *= factor;
        if (auto* t = std::get_if<TransitionPulse>(&e)) t->flip_angle *= factor;
    }
    return out;
}

std::string to_text(const PulseSequence& seq) {
    std::ostringstream out;
    for (const PulseEvent& e : seq.events) {
        std::visit(Overloaded{
                       [&](const RfPulse& p) {
                           out << "rf " << targets_token(p.targets) << ' ' << axis_token(p.axis) << ' '
                               << format_double(p.flip_angle) << '\n';
                       },
                       [&](const Delay& d) { out << "delay " << format_double(d.duration) << '\n'; },
                       [&](const GradientCrusher&) { out << "crush\n"; },
                       [&](const TransitionPulse& t) {
                           out << "tsel " << t.pair[0] << ' ' << t.pair[1] << ' ' << axis_token(t.axis) << ' '
                               << format_double(t.flip_angle) << '\n';
                       },
                   },
                   e);
    }
    return out.str();
}

PulseSequence parse_sequence(std::string_view text) {
    PulseSequence seq;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        auto expect = [&](size_t n) {
            if (tok.size() != n) {
                throw ParseError("line " + std::to_string(line_no) + ": '" + tok[0] + "' takes " +
                                 std::to_string(n - 1) + " arguments");
            }
        };
        PulseEvent event;
        if (tok[0] == "rf") {
            expect(4);
            event = RfPulse{parse_targets(tok[1], line_no), parse_axis(tok[2], line_no), parse_double(tok[3], line_no)};
        } else if (tok[0] == "delay") {
            expect(2);
            event = Delay{parse_double(tok[1], line_no)};
        } else if (tok[0] == "crush") {
            expect(1);
            event = GradientCrusher{};
        } else if (tok[0] == "tsel") {
            expect(5);
            event = TransitionPulse{{parse_index(tok[1], line_no), parse_index(tok[2], line_no)},
                                    parse_axis(tok[3], line_no),
                                    parse_double(tok[4], line_no)};
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown event '" + tok[0] + "'");
        }
        try {
            validate_event(event);
        } catch (const std::invalid_argument& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        seq.events.push_back(event);
    }
    return seq;
}

}  // namespace twopath
