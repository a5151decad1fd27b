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

#include "twopath/harness.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "twopath/errors.h"

namespace twopath {

namespace {

using std::numbers::pi;

DensityMatrix4 initial_state(const InitialState& init, const std::optional<PrepSolution>& prep, double rf_scale,
                             InvariantTracker* tracker) {
    if (std::holds_alternative<EffectivePureInit>(init)) {
        return effective_pure(std::get<EffectivePureInit>(init).params);
    }
    if (std::holds_alternative<ThermalInit>(init)) {
        return prepare(std::get<ThermalInit>(init).params, prep->angles, rf_scale, tracker);
    }
    return DensityMatrix4::from_pure(PureState4::basis(0));
}

DensityMatrix4 run_scaled(const PulseSequence& seq, double rf_scale, const DensityMatrix4& rho,
                          const SpinSystem& system, InvariantTracker* tracker) {
    return run_sequence(scale_flip_angles(seq, rf_scale), rho, system, tracker);
}

DensityMatrix4 conjugate(const Operator4& u, const DensityMatrix4& rho, InvariantTracker* tracker) {
    if (tracker) tracker->observe(u);
    DensityMatrix4 out = apply_unitary(u, rho);
    if (tracker) tracker->observe(out);
    return out;
}

}  // namespace

std::vector<double> uniform_phi_grid(int steps) {
    if (steps < 1) throw std::invalid_argument("phi grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) grid[k] = 2 * pi * k / steps;
    return grid;
}

void SweepConfig::validate() const {
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
    if (phi_grid.empty()) throw std::invalid_argument("phi grid is empty");
    for (double phi : phi_grid) {
        if (!(phi >= 0 && phi < 2 * pi)) throw std::invalid_argument("phi values must lie in [0, 2 pi)");
    }
    system.validate();
    fid.validate();
    if (error) error->validate();
    if (const auto* e = std::get_if<EffectivePureInit>(&initial)) e->params.validate();
    if (const auto* t = std::get_if<ThermalInit>(&initial)) t->params.validate();
}

Experiment::Experiment(SweepConfig config) : config_(std::move(config)) {
    config_.validate();
    if (const auto* t = std::get_if<ThermalInit>(&config_.initial)) {
        prep_ = solve_prep_angles(t->params);
    }
    if (config_.gate_level == GateLevel::kPulseCompiled && config_.scheme == SchemeId::kMarked) {
        cnot_phases_ = verify_cnot_sequence(config_.system);
        cnot_correction_ = phase_correction(*cnot_phases_);
    }
}

ShotStates Experiment::shot(double phi, double rf_scale, InvariantTracker* tracker, bool compensate) const {
    const DensityMatrix4 rho0 = initial_state(config_.initial, prep_, rf_scale, tracker);
    if (tracker) tracker->observe(rho0);
    DensityMatrix4 rho = rho0;
    if (config_.gate_level == GateLevel::kIdeal) {
        const Operator4 prep_gate = config_.scheme == SchemeId::kMarked ? r2_gate(config_.theta) : r1_gate(config_.theta);
        rho = conjugate(u_gate_ideal(phi) * prep_gate, rho, tracker);
    } else {
        const SpinSystem& sys = config_.system;
        rho = run_scaled(r1_pulse_sequence(config_.theta), rf_scale, rho, sys, tracker);
        if (config_.scheme == SchemeId::kMarked) {
            if (compensate) rho = conjugate(cnot_correction_, rho, tracker);
            rho = run_scaled(cnot_pulse_sequence(sys), rf_scale, rho, sys, tracker);
        }
        rho = run_scaled(u_pulse_sequence(phi), rf_scale, rho, sys, tracker);
    }
    return {rho0, rho, scale_flip_angles(readout_sequence(), rf_scale)};
}

ObservableArray Experiment::ideal_observables(double phi, bool compensate, InvariantTracker* tracker) const {
    const ShotStates s = shot(phi, 1.0, tracker, compensate);
    const ObservableArray raw = to_array(populations(s.final_state), coherences(s.final_state));
    return normalize(raw, infer_effective_pure(s.reference));
}

SweepRow Experiment::run_point(double phi, int row_index, InvariantTracker* tracker) const {
    SweepRow row;
    row.phi = phi;
    if (!config_.error) {
        row.values = ideal_observables(phi, true, tracker);
        return row;
    }
    const QuadratureTable table = config_.flip_quadrature ? QuadratureTable::flipped() : QuadratureTable{};
    const NoisyEstimate est = run_noisy_experiment(
        [&](double g, InvariantTracker* t) { return shot(phi, g, t); }, *config_.error, config_.system, config_.fid,
        table, static_cast<std::uint64_t>(row_index), tracker);
    row.values = est.mean;
    row.standard_error = est.standard_error;
    return row;
}

SweepRow run_point(const SweepConfig& config, double phi) {
    SweepConfig single = config;
    single.phi_grid = {phi};
    return Experiment(single).run_point(phi);
}

SweepDataset sweep(const SweepConfig& config) {
    const Experiment experiment(config);
    SweepDataset out;
    out.config = experiment.config();
    out.cnot_phases = experiment.cnot_phases();
    out.prep = experiment.prep();
    for (std::size_t k = 0; k < config.phi_grid.size(); ++k) {
        const double phi = config.phi_grid[k];
        out.rows.push_back(experiment.run_point(phi, static_cast<int>(k), &out.invariants));
        if (out.cnot_phases) {
            const ObservableArray with = experiment.ideal_observables(phi, true);
            const ObservableArray without = experiment.ideal_observables(phi, false);
            for (int i = 0; i < kObservableCount; ++i) {
                out.cnot_uncompensated_max_deviation =
                    std::max(out.cnot_uncompensated_max_deviation, std::abs(with[i] - without[i]));
            }
        }
    }
    return out;
}

Figure figure_from_int(int id) {
    switch (id) {
        case 2: return Figure::kFig2;
        case 3: return Figure::kFig3;
        case 4: return Figure::kFig4;
        default: throw std::invalid_argument("figure id must be 2, 3 or 4");
    }
}

SchemeId scheme_of(Figure figure) { return figure == Figure::kFig2 ? SchemeId::kUnmarked : SchemeId::kMarked; }
Figure figure_of(SchemeId scheme) { return scheme == SchemeId::kUnmarked ? Figure::kFig2 : Figure::kFig3; }

TheoryPoint theory_curve(Figure figure, double theta, double phi) {
    const double s = std::sin(theta);
    TheoryPoint out;
    if (figure == Figure::kFig2) {
        const auto unmarked = [&](double wave) {
            const double p00 = 0.5 * (1 + s * wave);
            const double p10 = 0.5 * (1 - s * wave);
            return to_array({p00, 0, p10, 0}, {0, 0});
        };
        out.derived = unmarked(std::cos(phi));
        out.caption = unmarked(std::sin(phi));
        return out;
    }
    const double c2 = std::cos(theta / 2) * std::cos(theta / 2);
    const double s2 = std::sin(theta / 2) * std::sin(theta / 2);
    const double coh = 0.5 * s * std::sin(phi);
    out.derived = to_array({0.5 * c2, 0.5 * s2, 0.5 * c2, 0.5 * s2}, {coh, -coh});
    // The caption states the marginals directly as 1/2.
    out.derived[static_cast<int>(Observable::kP0b)] = 0.5;
    out.derived[static_cast<int>(Observable::kP1b)] = 0.5;
    out.caption = out.derived;
    return out;
}

double visibility(const SweepDataset& dataset, Observable observable) {
    if (dataset.rows.empty()) throw DegenerateSignal("empty dataset");
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const SweepRow& r : dataset.rows) {
        lo = std::min(lo, get(r.values, observable));
        hi = std::max(hi, get(r.values, observable));
    }
    if (hi + lo < 1e-12) throw DegenerateSignal("max + min of the fringe vanishes");
    return (hi - lo) / (hi + lo);
}

FringeFit fit_fringe(const SweepDataset& dataset, Observable observable) {
    const int n = static_cast<int>(dataset.rows.size());
    if (n < 3) throw std::invalid_argument("fringe fit needs at least three grid points");
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd y(n);
    for (int k = 0; k < n; ++k) {
        const double phi = dataset.rows[k].phi;
        design(k, 0) = 1;
        design(k, 1) = std::cos(phi);
        design(k, 2) = std::sin(phi);
        y(k) = get(dataset.rows[k].values, observable);
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
    FringeFit out;
    out.mean = coef(0);
    out.cos_coefficient = coef(1);
    out.sin_coefficient = coef(2);
    out.amplitude = std::hypot(coef(1), coef(2));
    out.contrast = out.mean != 0 ? out.amplitude / out.mean : 0;
    out.max_residual = (design * coef - y).cwiseAbs().maxCoeff();
    return out;
}

double ResidualReport::max_abs() const {
    double m = 0;
    for (const auto& r : residuals) m = std::max(m, r.max_abs);
    return m;
}

double ResidualReport::max_rms() const {
    double m = 0;
    for (const auto& r : residuals) m = std::max(m, r.rms);
    return m;
}

ResidualReport compare(const SweepDataset& dataset, const CompareOptions& options) {
    if (options.observables.empty()) throw std::invalid_argument("compare needs at least one observable");
    if (dataset.rows.empty()) throw std::invalid_argument("compare needs a nonempty dataset");
    const double theta = dataset.config.theta;
    const auto theory = [&](double phi) {
        const TheoryPoint t = theory_curve(options.figure, theta, phi);
        return options.form == TheoryForm::kCaption ? t.caption : t.derived;
    };

    ResidualReport report;
    report.figure = options.figure;
    report.form = options.form;
    report.fitted_offset = options.fit_phi_offset;
    for (Observable o : options.observables) {
        ObservableResidual r;
        r.observable = o;
        if (options.fit_phi_offset) {
            // First harmonics h = sum y e^{-i phi}; theory(phi + d) has h_t e^{i d}.
            Complex h_data = 0;
            Complex h_theory = 0;
            for (const SweepRow& row : dataset.rows) {
                const Complex w = std::polar(1.0, -row.phi);
                h_data += get(row.values, o) * w;
                h_theory += get(theory(row.phi), o) * w;
            }
            if (std::abs(h_data) > 1e-12 && std::abs(h_theory) > 1e-12) {
                r.phi_offset = std::arg(h_data / h_theory);
                if (r.phi_offset < 0) r.phi_offset += 2 * pi;
            }
        }
        double ss = 0;
        for (const SweepRow& row : dataset.rows) {
            const double d = get(row.values, o) - get(theory(row.phi + r.phi_offset), o);
            r.max_abs = std::max(r.max_abs, std::abs(d));
            ss += d * d;
        }
        r.rms = std::sqrt(ss / dataset.rows.size());
        report.residuals.push_back(r);
    }
    return report;
}

std::string_view scheme_name(SchemeId scheme) { return scheme == SchemeId::kMarked ? "marked" : "unmarked"; }
std::string_view gate_level_name(GateLevel level) { return level == GateLevel::kIdeal ? "ideal" : "pulse"; }
std::string_view theory_form_name(TheoryForm form) { return form == TheoryForm::kDerived ? "derived" : "caption"; }

}  // namespace twopath
