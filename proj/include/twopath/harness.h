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

#ifndef TWOPATH_HARNESS_H
#define TWOPATH_HARNESS_H

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "twopath/gates.h"
#include "twopath/measurement.h"
#include "twopath/spectra.h"
#include "twopath/state_prep.h"

namespace twopath {

/// Unmarked: R1(theta) then U(phi). Marked: R2(theta) = CNOT R1(theta), then U(phi).
enum class SchemeId { kUnmarked, kMarked };
enum class GateLevel { kIdeal, kPulseCompiled };

struct PureInit {};
struct EffectivePureInit {
    EffectivePureParams params;
};
struct ThermalInit {
    ThermalParams params;
};
using InitialState = std::variant<PureInit, EffectivePureInit, ThermalInit>;

std::vector<double> uniform_phi_grid(int steps);

struct SweepConfig {
    double theta = 0;
    std::vector<double> phi_grid = uniform_phi_grid(24);
    SchemeId scheme = SchemeId::kUnmarked;
    GateLevel gate_level = GateLevel::kIdeal;
    InitialState initial = PureInit{};
    std::optional<ErrorModel> error;
    SpinSystem system;
    FidParams fid;
    bool flip_quadrature = false;

    /// Throws std::invalid_argument for an empty grid, phi outside [0, 2 pi)
    /// or invalid nested parameters.
    void validate() const;
};

struct SweepRow {
    double phi = 0;
    ObservableArray values{};
    std::optional<ObservableArray> standard_error;
};

struct SweepDataset {
    SweepConfig config;
    std::vector<SweepRow> rows;

    InvariantTracker invariants;
    /// Present for pulse-compiled marked sweeps.
    std::optional<DiagonalPhaseMatch> cnot_phases;
    /// Largest change in any observable when the CNOT phases are left
    /// uncompensated (pulse-compiled marked sweeps only).
    double cnot_uncompensated_max_deviation = 0;
    std::optional<PrepSolution> prep;
};

/// A configured experiment. Solves preparation angles and the CNOT phase
/// report once; rows can then be evaluated independently.
class Experiment {
 public:
    explicit Experiment(SweepConfig config);

    const SweepConfig& config() const { return config_; }
    const std::optional<DiagonalPhaseMatch>& cnot_phases() const { return cnot_phases_; }
    const std::optional<PrepSolution>& prep() const { return prep_; }

    /// States of one shot at the given RF scale. With compensate = false the
    /// recorded CNOT phases are not corrected.
    ShotStates shot(double phi, double rf_scale, InvariantTracker* tracker, bool compensate = true) const;

    /// Observables at phi: directly from the density matrix, or through the
    /// spectral route when an error model is configured. row_index selects
    /// the random stream.
    SweepRow run_point(double phi, int row_index = 0, InvariantTracker* tracker = nullptr) const;

    /// Direct-route observables, ignoring any error model.
    ObservableArray ideal_observables(double phi, bool compensate = true, InvariantTracker* tracker = nullptr) const;

 private:
    SweepConfig config_;
    std::optional<PrepSolution> prep_;
    std::optional<DiagonalPhaseMatch> cnot_phases_;
    Operator4 cnot_correction_;
};

SweepRow run_point(const SweepConfig& config, double phi);
SweepDataset sweep(const SweepConfig& config);

enum class Figure { kFig2 = 2, kFig3 = 3, kFig4 = 4 };
enum class TheoryForm { kDerived, kCaption };

/// Throws std::invalid_argument for ids other than 2, 3, 4.
Figure figure_from_int(int id);
SchemeId scheme_of(Figure figure);
/// Figures whose theory covers the scheme: Fig2 for unmarked, Fig3 for marked.
Figure figure_of(SchemeId scheme);

struct TheoryPoint {
    /// As printed with the figure.
    ObservableArray caption{};
    /// From the gate matrices. Differs from caption only for Fig2, where
    /// caption(phi) = derived(phi - pi/2).
    ObservableArray derived{};
};

TheoryPoint theory_curve(Figure figure, double theta, double phi);

/// (max - min) / (max + min) of one observable over the grid. Throws
/// DegenerateSignal when max + min < 1e-12.
double visibility(const SweepDataset& dataset, Observable observable);

/// Least-squares fit y = mean + a cos(phi) + b sin(phi).
struct FringeFit {
    double mean = 0;
    double cos_coefficient = 0;
    double sin_coefficient = 0;
    double amplitude = 0;
    /// amplitude / mean.
    double contrast = 0;
    double max_residual = 0;
};

FringeFit fit_fringe(const SweepDataset& dataset, Observable observable);

struct CompareOptions {
    Figure figure = Figure::kFig2;
    TheoryForm form = TheoryForm::kDerived;
    /// Shift the theory by the phi offset that aligns its first harmonic
    /// with the data before taking residuals.
    bool fit_phi_offset = false;
    std::vector<Observable> observables;
};

struct ObservableResidual {
    Observable observable = Observable::kP00;
    double max_abs = 0;
    double rms = 0;
    double phi_offset = 0;
};

struct ResidualReport {
    Figure figure = Figure::kFig2;
    TheoryForm form = TheoryForm::kDerived;
    bool fitted_offset = false;
    std::vector<ObservableResidual> residuals;

    double max_abs() const;
    double max_rms() const;
};

/// Throws std::invalid_argument for an empty observable selector.
ResidualReport compare(const SweepDataset& dataset, const CompareOptions& options);

std::string_view scheme_name(SchemeId scheme);
std::string_view gate_level_name(GateLevel level);
std::string_view theory_form_name(TheoryForm form);

}  // namespace twopath

#endif  // TWOPATH_HARNESS_H
