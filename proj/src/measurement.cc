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

#include "twopath/measurement.h"

#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "twopath/errors.h"

namespace twopath {

namespace {

constexpr std::array<std::string_view, kObservableCount> kNames = {"p00", "p01", "p10", "p11",
                                                                   "p0b", "p1b", "c0",  "c1"};

bool targets_spin(const PulseEvent& e, ObservedSpin spin) {
    const auto* p = std::get_if<RfPulse>(&e);
    if (!p) return false;
    return spin == ObservedSpin::kB ? p->targets.b : p->targets.a;
}

}  // namespace

std::array<int, 2> transition_indices(ObservedSpin spin, int partner) {
    if (partner != 0 && partner != 1) throw std::invalid_argument("partner state must be 0 or 1");
    if (spin == ObservedSpin::kB) return {partner, 2 + partner};
    return {2 * partner, 2 * partner + 1};
}

PopulationVector populations(const DensityMatrix4& rho) {
    return {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()};
}

MarginalB marginal_b(const PopulationVector& p) { return {p.p00 + p.p01, p.p10 + p.p11}; }

CoherencePair coherences(const DensityMatrix4& rho) { return {-2 * rho(0, 1).imag(), -2 * rho(2, 3).imag()}; }

LineAmplitudeSet line_amplitudes(const DensityMatrix4& rho, const PulseSequence& readout,
                                 InvariantTracker* tracker) {
    LineAmplitudeSet out;
    const SpinSystem system;
    for (ObservedSpin spin : {ObservedSpin::kB, ObservedSpin::kA}) {
        PulseSequence own;
        for (const PulseEvent& e : readout.events) {
            if (targets_spin(e, spin)) own.events.push_back(e);
        }
        const DensityMatrix4 after = own.events.empty() ? rho : run_sequence(own, rho, system, tracker);
        for (int partner = 0; partner < 2; ++partner) {
            const auto [lo, hi] = transition_indices(spin, partner);
            out.at(spin, partner) = 2.0 * after(lo, hi);
        }
    }
    return out;
}

std::string_view observable_name(Observable o) { return kNames[static_cast<int>(o)]; }

Observable parse_observable(std::string_view name) {
    for (int k = 0; k < kObservableCount; ++k) {
        if (kNames[k] == name) return kAllObservables[k];
    }
    throw std::invalid_argument("unknown observable '" + std::string(name) + "'");
}

ObservableArray to_array(const PopulationVector& p, const CoherencePair& c) {
    const MarginalB m = marginal_b(p);
    return {p.p00, p.p01, p.p10, p.p11, m.p0b, m.p1b, c.c0, c.c1};
}

PopulationVector populations_of(const ObservableArray& v) { return {v[0], v[1], v[2], v[3]}; }
CoherencePair coherences_of(const ObservableArray& v) { return {v[6], v[7]}; }

ObservableArray normalize(const ObservableArray& raw, const EffectivePureParams& params) {
    if (!(params.b > 0)) throw DegenerateSignal("effective pure state has B <= 0; nothing to normalize");
    const PopulationVector p = populations_of(raw);
    const PopulationVector q{(p.p00 - params.a) / params.b, (p.p01 - params.a) / params.b,
                             (p.p10 - params.a) / params.b, (p.p11 - params.a) / params.b};
    const CoherencePair c = coherences_of(raw);
    return to_array(q, {c.c0 / params.b, c.c1 / params.b});
}

double reference_scale(const LineAmplitudeSet& reference, const QuadratureTable& table) {
    const double db = table.population_sign * reference.at(ObservedSpin::kB, 0).real();
    const double da = table.population_sign * reference.at(ObservedSpin::kA, 0).real();
    return (db + da) / 2;
}

ObservableArray observables_from_lines(const LineAmplitudeSet& lines, double scale, const QuadratureTable& table) {
    if (!(std::abs(scale) > 1e-300)) throw DegenerateSignal("reference scale vanishes");
    // Rows: the population difference across each line, then the trace.
    Eigen::Matrix<double, 5, 4> design = Eigen::Matrix<double, 5, 4>::Zero();
    Eigen::Matrix<double, 5, 1> rhs;
    int row = 0;
    for (ObservedSpin spin : {ObservedSpin::kB, ObservedSpin::kA}) {
        for (int partner = 0; partner < 2; ++partner) {
            const auto [lo, hi] = transition_indices(spin, partner);
            design(row, lo) = 1;
            design(row, hi) = -1;
            rhs(row) = table.population_sign * lines.at(spin, partner).real() / scale;
            ++row;
        }
    }
    design.row(4).setOnes();
    rhs(4) = 1;
    const Eigen::Vector4d q = design.colPivHouseholderQr().solve(rhs);

    const CoherencePair c{table.coherence_sign * lines.at(ObservedSpin::kA, 0).imag() / scale,
                          table.coherence_sign * lines.at(ObservedSpin::kA, 1).imag() / scale};
    return to_array({q(0), q(1), q(2), q(3)}, c);
}

}  // namespace twopath
