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

#ifndef TWOPATH_MEASUREMENT_H
#define TWOPATH_MEASUREMENT_H

#include <array>
#include <string_view>

#include "twopath/pulse_engine.h"
#include "twopath/spin_algebra.h"
#include "twopath/state_prep.h"

namespace twopath {

struct PopulationVector {
    double p00 = 0;
    double p01 = 0;
    double p10 = 0;
    double p11 = 0;
};

struct MarginalB {
    double p0b = 0;
    double p1b = 0;
};

/// Signed coherences of the pairs (|00>,|01>) and (|10>,|11>).
struct CoherencePair {
    double c0 = 0;
    double c1 = 0;
};

enum class ObservedSpin { kB = 0, kA = 1 };

/// Four complex line amplitudes, one per (observed spin, partner state).
struct LineAmplitudeSet {
    std::array<Complex, 4> values{};

    Complex& at(ObservedSpin spin, int partner) { return values[2 * static_cast<int>(spin) + partner]; }
    Complex at(ObservedSpin spin, int partner) const { return values[2 * static_cast<int>(spin) + partner]; }
};

/// Basis indices (lower, upper) of the transition of `spin` with the other
/// spin held at `partner`; lower has the observed spin in |0>.
std::array<int, 2> transition_indices(ObservedSpin spin, int partner);

PopulationVector populations(const DensityMatrix4& rho);
MarginalB marginal_b(const PopulationVector& pops);
/// c0 = -2 Im rho[0][1], c1 = -2 Im rho[2][3].
CoherencePair coherences(const DensityMatrix4& rho);

/// For each observed nucleus the readout events that target it are applied
/// to rho (separate 1H and 13C acquisitions) and the line amplitude is
/// 2 rho'[lower][upper] of that transition.
LineAmplitudeSet line_amplitudes(const DensityMatrix4& rho, const PulseSequence& readout,
                                 InvariantTracker* tracker = nullptr);

/// Quadrature assignment of the readout lines, frozen from a direct
/// simulation of the marked scheme with the default readout:
///   line = population_sign * (p_lower - p_upper) + i coherence_sign * c
/// where c is the pre-readout signed coherence of the transition.
struct QuadratureTable {
    double population_sign = -1;
    double coherence_sign = -1;

    static QuadratureTable flipped() { return {-1, 1}; }
};

/// The eight observables of a sweep row, in CSV column order.
enum class Observable { kP00, kP01, kP10, kP11, kP0b, kP1b, kC0, kC1 };
inline constexpr int kObservableCount = 8;
inline constexpr std::array<Observable, kObservableCount> kAllObservables = {
    Observable::kP00, Observable::kP01, Observable::kP10, Observable::kP11,
    Observable::kP0b, Observable::kP1b, Observable::kC0,  Observable::kC1};

std::string_view observable_name(Observable o);
/// Throws std::invalid_argument for an unknown name.
Observable parse_observable(std::string_view name);

using ObservableArray = std::array<double, kObservableCount>;

ObservableArray to_array(const PopulationVector& pops, const CoherencePair& coh);
PopulationVector populations_of(const ObservableArray& v);
CoherencePair coherences_of(const ObservableArray& v);
inline double get(const ObservableArray& v, Observable o) { return v[static_cast<int>(o)]; }

/// Maps A E + B rho_pure observables back to those of rho_pure.
ObservableArray normalize(const ObservableArray& raw, const EffectivePureParams& params);

/// Reference signal of an |00>-like initial state: mean of the population
/// differences on the two partner-0 lines (equals B for A E + B |00><00|).
double reference_scale(const LineAmplitudeSet& reference, const QuadratureTable& table = {});

/// Normalized populations and coherences from line amplitudes. Populations
/// solve the four line differences plus sum = 1 in the least-squares sense.
ObservableArray observables_from_lines(const LineAmplitudeSet& lines, double reference_scale,
                                       const QuadratureTable& table = {});

}  // namespace twopath

#endif  // TWOPATH_MEASUREMENT_H
