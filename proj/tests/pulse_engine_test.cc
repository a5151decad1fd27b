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

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.h"
#include "twopath/errors.h"

using namespace twopath;
using namespace twopath::testing;

namespace {

const SpinSystem kSystem{};

Mat2 half_pi_y_block() {
    Mat2 m;
    m << 1, -1, 1, 1;
    return m / std::sqrt(2.0);
}

/// Generic series exponential of a 4x4 generator, independent of the closed forms.
Mat4 expm(const Mat4& generator) { return Mat4(generator).exp(); }

}  // namespace

TEST(pulse_engine, rf_half_pi_y_on_b) {
    const Operator4 u = rf_propagator(Targets::spin_b(), Axis::kPlusY, kPi / 2);
    const Mat4 expected = kron(Operator2{half_pi_y_block()}, Operator2{}).matrix();
    EXPECT_LT(max_abs(Mat4(u.matrix() - expected)), 1e-15);
}

TEST(pulse_engine, rf_zero_angle_is_identity) {
    for (Axis ax : {Axis::kPlusX, Axis::kMinusX, Axis::kPlusY, Axis::kMinusY}) {
        EXPECT_LT(max_abs(Mat4(rf_propagator(Targets::spin_b(), ax, 0).matrix() - Mat4::Identity())), 1e-15);
    }
}

TEST(pulse_engine, rf_both_is_tensor_square) {
    const Operator4 u = rf_propagator(Targets::both(), Axis::kPlusY, kPi / 2);
    const Operator2 blk{half_pi_y_block()};
    EXPECT_LT(max_abs(Mat4(u.matrix() - kron(blk, blk).matrix())), 1e-15);
}

TEST(pulse_engine, rf_matches_series_exponential) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ang(-7, 7);
    const Mat4 ix_b = kron(spin_x(), Operator2{}).matrix(), iy_b = kron(spin_y(), Operator2{}).matrix();
    const Mat4 ix_a = kron(Operator2{}, spin_x()).matrix(), iy_a = kron(Operator2{}, spin_y()).matrix();
    for (int trial = 0; trial < 20; ++trial) {
        const double t = ang(rng);
        const Complex mi(0, -t);
        EXPECT_LT(max_abs(Mat4(rf_propagator(Targets::spin_b(), Axis::kPlusX, t).matrix() - expm(mi * ix_b))), 1e-12);
        EXPECT_LT(max_abs(Mat4(rf_propagator(Targets::spin_a(), Axis::kMinusY, t).matrix() - expm(-mi * iy_a))), 1e-12);
        EXPECT_LT(max_abs(Mat4(rf_propagator(Targets::both(), Axis::kMinusX, t).matrix() -
                               expm(-mi * (ix_a + ix_b)))), 1e-12);
        EXPECT_LT(max_abs(Mat4(rf_propagator(Targets::both(), Axis::kPlusY, t).matrix() -
                               expm(mi * (iy_a + iy_b)))), 1e-12);
    }
}

TEST(pulse_engine, j_propagator_values) {
    EXPECT_LT(max_abs(Mat4(j_propagator(0, kSystem).matrix() - Mat4::Identity())), 1e-15);

    const Operator4 half = j_propagator(1 / (2 * kSystem.j_coupling_hz), kSystem);
    const Complex m = std::polar(1.0, -kPi / 4), p = std::polar(1.0, kPi / 4);
    EXPECT_LT(max_abs(Mat4(half.matrix() - Mat4(Vec4(m, p, p, m).asDiagonal()))), 1e-15);

    const Operator4 full = j_propagator(2 / kSystem.j_coupling_hz, kSystem);
    EXPECT_LT(max_abs(Mat4(full.matrix() + Mat4::Identity())), 1e-14);
}

TEST(pulse_engine, j_propagator_matches_coupling_hamiltonian) {
    const Mat4 zz = kron(spin_z(), spin_z()).matrix();
    for (double t : {1e-4, 2.3e-3, 0.05}) {
        const Mat4 oracle = expm(Complex(0, -2 * kPi * kSystem.j_coupling_hz * t) * zz);
        EXPECT_LT(max_abs(Mat4(j_propagator(t, kSystem).matrix() - oracle)), 1e-12);
    }
}

TEST(pulse_engine, j_propagator_semigroup) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 0.01);
    for (int trial = 0; trial < 50; ++trial) {
        const double t1 = u(rng), t2 = u(rng);
        const Mat4 lhs = (j_propagator(t1, kSystem) * j_propagator(t2, kSystem)).matrix();
        EXPECT_LT(max_abs(Mat4(lhs - j_propagator(t1 + t2, kSystem).matrix())), 1e-12);
    }
}

TEST(pulse_engine, j_propagator_rejects_negative) {
    EXPECT_THROW(j_propagator(-1e-3, kSystem), std::invalid_argument);
}

TEST(pulse_engine, crusher_behaviour) {
    Mat4 diag = Mat4::Zero();
    diag.diagonal() << 0.4, 0.3, 0.2, 0.1;
    EXPECT_EQ(crusher(DensityMatrix4(diag)).matrix(), diag);

    const PureState4 psi(amplitudes(1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0), 0));
    Mat4 expected = Mat4::Zero();
    expected(0, 0) = expected(2, 2) = 0.5;
    EXPECT_LT(max_abs(Mat4(crusher(DensityMatrix4::from_pure(psi)).matrix() - expected)), 1e-15);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix4 rho(random_density(rng));
        const Mat4 out = crusher(rho).matrix();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j) EXPECT_EQ(out(i, j), Complex(0, 0));
        EXPECT_EQ(out.diagonal(), rho.matrix().diagonal());
    }
}

TEST(pulse_engine, transition_pi_swaps_populations) {
    Mat4 diag = Mat4::Zero();
    diag.diagonal() << 0.4, 0.3, 0.2, 0.1;
    const DensityMatrix4 out = apply_unitary(transition_propagator({2, 3}, Axis::kPlusY, kPi), DensityMatrix4(diag));
    EXPECT_NEAR(out(2, 2).real(), 0.1, 1e-15);
    EXPECT_NEAR(out(3, 3).real(), 0.2, 1e-15);
    EXPECT_NEAR(out(0, 0).real(), 0.4, 1e-15);
    EXPECT_NEAR(out(1, 1).real(), 0.3, 1e-15);
}

TEST(pulse_engine, transition_zero_angle_and_bad_pair) {
    EXPECT_LT(max_abs(Mat4(transition_propagator({1, 3}, Axis::kPlusX, 0).matrix() - Mat4::Identity())), 1e-15);
    EXPECT_THROW(transition_propagator({2, 2}, Axis::kPlusY, 1), std::invalid_argument);
    EXPECT_THROW(transition_propagator({0, 4}, Axis::kPlusY, 1), std::invalid_argument);
}

TEST(pulse_engine, transition_population_transfer_matches_conjugation) {
    Mat4 diag = Mat4::Zero();
    diag.diagonal() << 0.4, 0.3, 0.2, 0.1;
    for (double theta : {0.3, 1.1, 2.5}) {
        // Oracle: explicit 4x4 embedding of exp(-i theta I_y) on the (1,3) block.
        Mat4 u = Mat4::Identity();
        u(1, 1) = u(3, 3) = std::cos(theta / 2);
        u(1, 3) = -std::sin(theta / 2);
        u(3, 1) = std::sin(theta / 2);
        const Mat4 oracle = u * diag * u.adjoint();
        const DensityMatrix4 out =
            apply_unitary(transition_propagator({1, 3}, Axis::kPlusY, theta), DensityMatrix4(diag));
        EXPECT_LT(max_abs(Mat4(out.matrix() - oracle)), 1e-15);
        const double c2 = std::pow(std::cos(theta / 2), 2), s2 = std::pow(std::sin(theta / 2), 2);
        EXPECT_NEAR(out(1, 1).real(), 0.3 * c2 + 0.1 * s2, 1e-15);
    }
}

TEST(pulse_engine, run_sequence_single_event) {
    std::mt19937_64 rng(12);
    const DensityMatrix4 rho(random_density(rng));
    const PulseSequence seq{{RfPulse{Targets::spin_a(), Axis::kMinusX, 0.7}}};
    const DensityMatrix4 out = run_sequence(seq, rho, kSystem);
    const DensityMatrix4 direct = apply_unitary(rf_propagator(Targets::spin_a(), Axis::kMinusX, 0.7), rho);
    EXPECT_LT(max_abs(Mat4(out.matrix() - direct.matrix())), 1e-15);
}

TEST(pulse_engine, run_sequence_product_order) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix4 rho(random_density(rng));
        const PulseEvent e1 = RfPulse{Targets::spin_b(), Axis::kPlusY, 0.4 + trial * 0.1};
        const PulseEvent e2 = Delay{1e-3 * trial};
        const PulseEvent e3 = TransitionPulse{{0, 3}, Axis::kPlusX, 1.3};
        PulseSequence seq;
        seq.then(e1).then(e2).then(e3);
        const Mat4 u = event_propagator(e3, kSystem).matrix() * event_propagator(e2, kSystem).matrix() *
                       event_propagator(e1, kSystem).matrix();
        const Mat4 oracle = u * rho.matrix() * u.adjoint();
        EXPECT_LT(max_abs(Mat4(run_sequence(seq, rho, kSystem).matrix() - oracle)), 1e-12);
        EXPECT_LT(max_abs(Mat4(compile_unitary(seq, kSystem).matrix() - u)), 1e-12);
        EXPECT_LT(unitarity_error(compile_unitary(seq, kSystem).matrix()), 1e-12);
    }
}

TEST(pulse_engine, crusher_sequence_is_idempotent) {
    std::mt19937_64 rng(14);
    const DensityMatrix4 rho(random_density(rng));
    PulseSequence once;
    once.then(RfPulse{Targets::both(), Axis::kPlusX, 0.9}).then(GradientCrusher{});
    PulseSequence twice = once;
    twice.then(GradientCrusher{});
    const DensityMatrix4 a = run_sequence(once, rho, kSystem), b = run_sequence(twice, rho, kSystem);
    EXPECT_EQ(a.matrix(), b.matrix());
    EXPECT_LT(std::abs(a.matrix().trace() - 1.0), 1e-12);
}

TEST(pulse_engine, compile_unitary_contract) {
    const PulseSequence one{{RfPulse{Targets::spin_b(), Axis::kPlusY, kPi / 2}}};
    EXPECT_LT(max_abs(Mat4(compile_unitary(one, kSystem).matrix() -
                           rf_propagator(Targets::spin_b(), Axis::kPlusY, kPi / 2).matrix())), 0.0 + 1e-15);

    PulseSequence crushed;
    crushed.then(RfPulse{Targets::spin_b(), Axis::kPlusY, 1}).then(Delay{1e-3}).then(GradientCrusher{});
    EXPECT_THROW(compile_unitary(crushed, kSystem), NonUnitarySequence);
    EXPECT_THROW(compile_unitary(PulseSequence{}, kSystem), std::invalid_argument);
}

TEST(pulse_engine, run_sequence_agrees_with_compiled_on_random_states) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> ang(-4, 4);
    for (int trial = 0; trial < 30; ++trial) {
        PulseSequence seq;
        seq.then(RfPulse{Targets::spin_a(), Axis::kPlusX, ang(rng)})
            .then(Delay{std::abs(ang(rng)) * 1e-3})
            .then(RfPulse{Targets::both(), Axis::kMinusY, ang(rng)})
            .then(TransitionPulse{{1, 2}, Axis::kMinusX, ang(rng)});
        const DensityMatrix4 rho(random_density(rng));
        const DensityMatrix4 via_compile = apply_unitary(compile_unitary(seq, kSystem), rho);
        EXPECT_LT(max_abs(Mat4(run_sequence(seq, rho, kSystem).matrix() - via_compile.matrix())), 1e-12);
    }
}

TEST(pulse_engine, axis_label_map) {
    EXPECT_EQ(map_axis_label(Axis::kMinusY), Axis::kPlusY);
    EXPECT_EQ(map_axis_label(Axis::kMinusX), Axis::kPlusX);
    EXPECT_EQ(map_axis_label(Axis::kPlusY), Axis::kMinusY);
    EXPECT_EQ(map_axis_label(Axis::kMinusY, AxisConvention::kDirect), Axis::kMinusY);
}

TEST(pulse_engine, text_round_trip) {
    PulseSequence seq;
    seq.then(RfPulse{Targets::spin_b(), Axis::kPlusY, 1.5707963})
        .then(Delay{0.0023256})
        .then(GradientCrusher{})
        .then(TransitionPulse{{2, 3}, Axis::kPlusY, 3.1415927})
        .then(RfPulse{Targets::both(), Axis::kMinusX, kPi / 3});
    const std::string text = to_text(seq);
    EXPECT_NE(text.find("rf b +y 1.5707963\n"), std::string::npos);
    EXPECT_NE(text.find("delay 0.0023256\n"), std::string::npos);
    EXPECT_NE(text.find("crush\n"), std::string::npos);
    EXPECT_NE(text.find("tsel 2 3 +y 3.1415927\n"), std::string::npos);
    EXPECT_EQ(parse_sequence(text), seq);
}

TEST(pulse_engine, parse_comments_and_errors) {
    const PulseSequence seq = parse_sequence("# header\nrf a -x 0.5  # trailing\n\ndelay 1e-3\n");
    ASSERT_EQ(seq.events.size(), 2u);
    EXPECT_EQ(std::get<RfPulse>(seq.events[0]), (RfPulse{Targets::spin_a(), Axis::kMinusX, 0.5}));
    EXPECT_THROW(parse_sequence("rf c +x 1\n"), ParseError);
    EXPECT_THROW(parse_sequence("rf b +z 1\n"), ParseError);
    EXPECT_THROW(parse_sequence("delay\n"), ParseError);
    EXPECT_THROW(parse_sequence("delay -1\n"), ParseError);
    EXPECT_THROW(parse_sequence("tsel 1 1 +y 1\n"), ParseError);
    EXPECT_THROW(parse_sequence("wait 3\n"), ParseError);
    try {
        parse_sequence("crush\nbogus\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(pulse_engine, scale_flip_angles_leaves_delays) {
    PulseSequence seq;
    seq.then(RfPulse{Targets::spin_b(), Axis::kPlusY, 1.0}).then(Delay{2e-3}).then(TransitionPulse{{1, 3}, Axis::kPlusY, 0.5});
    const PulseSequence scaled = scale_flip_angles(seq, 1.1);
    EXPECT_DOUBLE_EQ(std::get<RfPulse>(scaled.events[0]).flip_angle, 1.1);
    EXPECT_DOUBLE_EQ(std::get<Delay>(scaled.events[1]).duration, 2e-3);
    EXPECT_DOUBLE_EQ(std::get<TransitionPulse>(scaled.events[2]).flip_angle, 0.55);
}

TEST(pulse_engine, spin_system_validation) {
    EXPECT_NO_THROW(kSystem.validate());
    EXPECT_THROW((SpinSystem{0, 125, 500}).validate(), std::invalid_argument);
    EXPECT_THROW((SpinSystem{215, -1, 500}).validate(), std::invalid_argument);
}
