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

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.h"
#include "twopath/errors.h"

using namespace twopath;
using namespace twopath::testing;

namespace {

SweepConfig marked_config() {
    SweepConfig c;
    c.scheme = SchemeId::kMarked;
    c.theta = deg(53.24);
    c.phi_grid = uniform_phi_grid(6);
    return c;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(dataset_io, csv_number_format) {
    EXPECT_EQ(csv_number(0.5), "0.5");
    EXPECT_EQ(csv_number(kPi), "3.14159265359");
    EXPECT_EQ(csv_number(-1e-20), "-1e-20");
    EXPECT_EQ(csv_number(0), "0");
}

TEST(dataset_io, csv_round_trip) {
    const SweepDataset d = sweep(marked_config());
    std::ostringstream out;
    write_csv(out, d);
    EXPECT_EQ(first_line(out.str()), "phi_rad,p00,p01,p10,p11,p0b,p1b,c0,c1");
    std::istringstream in(out.str());
    const std::vector<SweepRow> rows = read_csv(in);
    ASSERT_EQ(rows.size(), d.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_NEAR(rows[i].phi, d.rows[i].phi, 1e-11 * std::max(1.0, d.rows[i].phi));
        for (int k = 0; k < kObservableCount; ++k) EXPECT_NEAR(rows[i].values[k], d.rows[i].values[k], 1e-12);
        EXPECT_FALSE(rows[i].standard_error.has_value());
    }
    // Text is a fixed point of parse + write.
    SweepDataset again = d;
    again.rows = rows;
    std::ostringstream out2;
    write_csv(out2, again);
    EXPECT_EQ(out.str(), out2.str());
}

TEST(dataset_io, csv_with_standard_errors) {
    SweepDataset d;
    SweepRow r;
    r.phi = 1.25;
    r.values = {0.25, 0.25, 0.25, 0.25, 0.5, 0.5, 0.1, -0.1};
    r.standard_error = ObservableArray{0.01, 0.01, 0.01, 0.01, 0.002, 0.002, 0.003, 0.003};
    d.rows = {r};
    std::ostringstream out;
    write_csv(out, d);
    EXPECT_EQ(first_line(out.str()),
              "phi_rad,p00,p01,p10,p11,p0b,p1b,c0,c1,se_p00,se_p01,se_p10,se_p11,se_p0b,se_p1b,se_c0,se_c1");
    std::istringstream in(out.str());
    const auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 1u);
    ASSERT_TRUE(rows[0].standard_error.has_value());
    EXPECT_EQ(*rows[0].standard_error, *r.standard_error);
    EXPECT_EQ(rows[0].values, r.values);
}

TEST(dataset_io, csv_rejects_malformed_input) {
    std::istringstream empty("");
    EXPECT_THROW(read_csv(empty), ParseError);
    std::istringstream bad_header("phi,p00\n");
    EXPECT_THROW(read_csv(bad_header), ParseError);
    std::istringstream short_row("phi_rad,p00,p01,p10,p11,p0b,p1b,c0,c1\n0,1,2\n");
    EXPECT_THROW(read_csv(short_row), ParseError);
    std::istringstream bad_number("phi_rad,p00,p01,p10,p11,p0b,p1b,c0,c1\n0,1,0,0,0,1,0,0,x\n");
    EXPECT_THROW(read_csv(bad_number), ParseError);
    std::istringstream crlf("phi_rad,p00,p01,p10,p11,p0b,p1b,c0,c1\r\n0,1,0,0,0,1,0,0,0\r\n");
    EXPECT_EQ(read_csv(crlf).size(), 1u);
}

TEST(dataset_io, config_json_round_trip) {
    SweepConfig c = marked_config();
    c.gate_level = GateLevel::kPulseCompiled;
    c.initial = ThermalInit{{0.02, 0.07}};
    c.error = ErrorModel{0.05, 0.02, 64, 7};
    c.flip_quadrature = true;
    c.fid.t2 = 0.25;
    c.system.j_coupling_hz = 200;
    const nlohmann::ordered_json j = config_to_json(c);
    const SweepConfig back = config_from_json(nlohmann::ordered_json::parse(j.dump()));
    EXPECT_EQ(config_to_json(back).dump(), j.dump());
    EXPECT_EQ(back.scheme, c.scheme);
    EXPECT_EQ(back.phi_grid, c.phi_grid);
    EXPECT_EQ(back.error->seed, 7u);
    EXPECT_EQ(std::get<ThermalInit>(back.initial).params.eps_a, 0.07);

    SweepConfig e = marked_config();
    e.initial = EffectivePureInit{{0.2475, 0.01}};
    const SweepConfig eb = config_from_json(config_to_json(e));
    EXPECT_EQ(std::get<EffectivePureInit>(eb.initial).params.b, 0.01);
    EXPECT_FALSE(eb.error.has_value());
}

TEST(dataset_io, config_json_key_order_is_stable) {
    const nlohmann::ordered_json j = config_to_json(marked_config());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    ASSERT_GE(keys.size(), 4u);
    EXPECT_EQ(keys[0], "scheme");
    EXPECT_EQ(keys[1], "theta_rad");
    EXPECT_EQ(keys[2], "theta_deg");
}

TEST(dataset_io, config_json_rejects_bad_values) {
    nlohmann::ordered_json j = config_to_json(marked_config());
    j.erase("scheme");
    EXPECT_THROW(config_from_json(j), ParseError);
    j = config_to_json(marked_config());
    j["theta_rad"] = "ninety";
    EXPECT_THROW(config_from_json(j), ParseError);
}

TEST(dataset_io, sidecar_contents) {
    SweepConfig c = marked_config();
    c.gate_level = GateLevel::kPulseCompiled;
    const SweepDataset d = sweep(c);
    CompareOptions o;
    o.figure = Figure::kFig4;
    o.observables = {Observable::kC0, Observable::kC1};
    const nlohmann::ordered_json j = sidecar_json(d, {compare(d, o)});
    EXPECT_TRUE(j.contains("population_ratio"));
    EXPECT_NEAR(j["population_ratio"].get<double>(), 3.980878862155983, 1e-12);
    EXPECT_TRUE(j.contains("cnot_phase_3"));
    EXPECT_TRUE(j.contains("cnot_uncompensated_max_deviation"));
    EXPECT_TRUE(j.contains("residual_fig4_derived_c0_max_abs"));
    EXPECT_TRUE(j.contains("residual_fig4_derived_c1_rms"));
    EXPECT_LT(j["residual_fig4_derived_c0_max_abs"].get<double>(), 1e-10);
    for (auto it = j.begin(); it != j.end(); ++it) {
        EXPECT_FALSE(it.value().is_object()) << it.key();  // flat object
    }
    EXPECT_FALSE(j.contains("theory_forms_note"));

    const SweepDataset u = sweep(SweepConfig{});
    EXPECT_TRUE(sidecar_json(u, {}).contains("theory_forms_note"));
}
