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

#include "twopath/dataset_io.h"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "twopath/errors.h"

namespace twopath {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string expected_header(bool with_errors) {
    std::string h = "phi_rad";
    for (Observable o : kAllObservables) h += "," + std::string(observable_name(o));
    if (with_errors) {
        for (Observable o : kAllObservables) h += ",se_" + std::string(observable_name(o));
    }
    return h;
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("sidecar is missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad value for key '") + key + "': " + e.what());
    }
}

}  // namespace

std::string csv_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void write_csv(std::ostream& out, const SweepDataset& dataset) {
    const bool with_errors = !dataset.rows.empty() && dataset.rows.front().standard_error.has_value();
    out << expected_header(with_errors) << '\n';
    for (const SweepRow& row : dataset.rows) {
        out << csv_number(row.phi);
        for (double v : row.values) out << ',' << csv_number(v);
        if (with_errors) {
            for (double v : *row.standard_error) out << ',' << csv_number(v);
        }
        out << '\n';
    }
}

std::vector<SweepRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty dataset CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool with_errors = false;
    if (line == expected_header(true)) {
        with_errors = true;
    } else if (line != expected_header(false)) {
        throw ParseError("unexpected dataset header: " + line);
    }
    const std::size_t columns = with_errors ? 17 : 9;

    std::vector<SweepRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != columns) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " fields");
        }
        std::vector<double> v;
        for (const std::string& f : fields) {
            std::size_t used = 0;
            double x = 0;
            try {
                x = std::stod(f, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != f.size()) {
                throw ParseError("line " + std::to_string(line_no) + ": bad number '" + f + "'");
            }
            v.push_back(x);
        }
        SweepRow row;
        row.phi = v[0];
        std::copy(v.begin() + 1, v.begin() + 9, row.values.begin());
        if (with_errors) {
            ObservableArray se{};
            std::copy(v.begin() + 9, v.end(), se.begin());
            row.standard_error = se;
        }
        rows.push_back(row);
    }
    return rows;
}

json config_to_json(const SweepConfig& c) {
    json j;
    j["scheme"] = scheme_name(c.scheme);
    j["theta_rad"] = c.theta;
    j["theta_deg"] = c.theta * 180 / std::numbers::pi;
    j["phi_grid"] = c.phi_grid;
    j["gate_level"] = gate_level_name(c.gate_level);
    if (const auto* e = std::get_if<EffectivePureInit>(&c.initial)) {
        j["initial"] = "effpure";
        j["eff_a"] = e->params.a;
        j["eff_b"] = e->params.b;
    } else if (const auto* t = std::get_if<ThermalInit>(&c.initial)) {
        j["initial"] = "thermal";
        j["eps_b"] = t->params.eps_b;
        j["eps_a"] = t->params.eps_a;
    } else {
        j["initial"] = "pure";
    }
    j["j_coupling_hz"] = c.system.j_coupling_hz;
    j["freq_b_mhz"] = c.system.freq_b_mhz;
    j["freq_a_mhz"] = c.system.freq_a_mhz;
    j["dwell_time_s"] = c.fid.dwell_time;
    j["n_points"] = c.fid.n_points;
    j["t2_s"] = c.fid.t2;
    j["offset_b_hz"] = c.fid.offset_b_hz;
    j["offset_a_hz"] = c.fid.offset_a_hz;
    j["flip_quadrature"] = c.flip_quadrature;
    j["error_model"] = c.error.has_value();
    if (c.error) {
        j["rf_scale_sigma"] = c.error->rf_scale_sigma;
        j["noise_sigma"] = c.error->noise_sigma;
        j["n_shots"] = c.error->n_shots;
        j["seed"] = c.error->seed;
    }
    return j;
}

SweepConfig config_from_json(const json& j) {
    SweepConfig c;
    const auto scheme = require<std::string>(j, "scheme");
    if (scheme == "marked") {
        c.scheme = SchemeId::kMarked;
    } else if (scheme == "unmarked") {
        c.scheme = SchemeId::kUnmarked;
    } else {
        throw ParseError("unknown scheme '" + scheme + "'");
    }
    c.theta = require<double>(j, "theta_rad");
    c.phi_grid = require<std::vector<double>>(j, "phi_grid");
    const auto gates = require<std::string>(j, "gate_level");
    if (gates == "ideal") {
        c.gate_level = GateLevel::kIdeal;
    } else if (gates == "pulse") {
        c.gate_level = GateLevel::kPulseCompiled;
    } else {
        throw ParseError("unknown gate level '" + gates + "'");
    }
    const auto init = require<std::string>(j, "initial");
    if (init == "effpure") {
        c.initial = EffectivePureInit{{require<double>(j, "eff_a"), require<double>(j, "eff_b")}};
    } else if (init == "thermal") {
        c.initial = ThermalInit{{require<double>(j, "eps_b"), require<double>(j, "eps_a")}};
    } else if (init == "pure") {
        c.initial = PureInit{};
    } else {
        throw ParseError("unknown initial state '" + init + "'");
    }
    c.system = {require<double>(j, "j_coupling_hz"), require<double>(j, "freq_b_mhz"),
                require<double>(j, "freq_a_mhz")};
    c.fid = {require<double>(j, "dwell_time_s"), require<int>(j, "n_points"), require<double>(j, "t2_s"),
             require<double>(j, "offset_b_hz"), require<double>(j, "offset_a_hz")};
    c.flip_quadrature = require<bool>(j, "flip_quadrature");
    if (require<bool>(j, "error_model")) {
        c.error = ErrorModel{require<double>(j, "rf_scale_sigma"), require<double>(j, "noise_sigma"),
                             require<int>(j, "n_shots"), require<std::uint64_t>(j, "seed")};
    }
    return c;
}

json sidecar_json(const SweepDataset& dataset, const std::vector<ResidualReport>& reports) {
    json j = config_to_json(dataset.config);
    j["population_ratio"] = GateParams{dataset.config.theta}.population_ratio();
    if (dataset.cnot_phases) {
        j["cnot_distance"] = dataset.cnot_phases->distance;
        for (int k = 0; k < 4; ++k) j["cnot_phase_" + std::to_string(k)] = dataset.cnot_phases->phases[k];
        j["cnot_uncompensated_max_deviation"] = dataset.cnot_uncompensated_max_deviation;
    }
    if (dataset.prep) {
        j["prep_angle1_rad"] = dataset.prep->angles.angle1;
        j["prep_angle2_rad"] = dataset.prep->angles.angle2;
        j["prep_residual"] = dataset.prep->residual;
        j["prep_a"] = dataset.prep->state.a;
        j["prep_b"] = dataset.prep->state.b;
    }
    const InvariantTracker& inv = dataset.invariants;
    j["invariant_max_hermiticity_error"] = inv.max_hermiticity_error;
    j["invariant_max_trace_error"] = inv.max_trace_error;
    j["invariant_min_eigenvalue"] = inv.min_eigenvalue;
    j["invariant_max_unitarity_error"] = inv.max_unitarity_error;
    if (dataset.config.scheme == SchemeId::kUnmarked) {
        j["theory_forms_note"] =
            "unmarked populations: derived form 1/2(1 +- sin(theta) cos(phi)) from the gate matrices; caption form "
            "1/2(1 +- sin(theta) sin(phi)); caption(phi) = derived(phi - pi/2)";
    }
    for (const ResidualReport& report : reports) {
        std::string prefix = "residual_fig" + std::to_string(static_cast<int>(report.figure)) + "_" +
                             std::string(theory_form_name(report.form)) + (report.fitted_offset ? "_fitted" : "");
        for (const ObservableResidual& r : report.residuals) {
            const std::string key = prefix + "_" + std::string(observable_name(r.observable));
            j[key + "_max_abs"] = r.max_abs;
            j[key + "_rms"] = r.rms;
            if (report.fitted_offset) j[key + "_phi_offset"] = r.phi_offset;
        }
    }
    return j;
}

}  // namespace twopath
