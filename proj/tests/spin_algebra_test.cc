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

#include "twopath/spin_algebra.h"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.h"
#include "twopath/errors.h"

using namespace twopath;
using namespace twopath::testing;

namespace {

Mat4 sigma_x_on_b() {
    Operator2 x;
    x.m << 0, 1, 1, 0;
    return on_spin_b(x).matrix();
}

/// Brute-force scan of |lambda| = 1 at 1e-3 rad resolution.
double scanned_global_distance(const Mat4& u, const Mat4& v) {
    double best = INFINITY;
    for (int k = 0; k < 6284; ++k) {
        best = std::min(best, max_abs(Mat4(u - std::polar(1.0, k * 1e-3) * v)));
    }
    return best;
}

}  // namespace

TEST(spin_algebra, kron_identity) {
    EXPECT_LT(max_abs(Mat4(kron(Operator2{}, Operator2{}).matrix() - Mat4::Identity())), 1e-15);
}

TEST(spin_algebra, kron_sigma_x_on_b_swaps_pairs) {
    const Mat4 p = sigma_x_on_b();
    Mat4 expected = Mat4::Zero();
    expected(0, 2) = expected(2, 0) = expected(1, 3) = expected(3, 1) = 1;
    EXPECT_EQ(p, expected);
}

TEST(spin_algebra, kron_iz_iz) {
    const Mat4 zz = kron(spin_z(), spin_z()).matrix();
    const Eigen::Vector4cd d(0.25, -0.25, -0.25, 0.25);
    EXPECT_LT(max_abs(Mat4(zz - Mat4(d.asDiagonal()))), 1e-15);
}

TEST(spin_algebra, kron_mixed_product_property) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Operator2 a{random_matrix2(rng)}, b{random_matrix2(rng)};
        const Operator2 c{random_matrix2(rng)}, d{random_matrix2(rng)};
        const Mat4 lhs = kron(a, b).matrix() * kron(c, d).matrix();
        const Mat4 rhs = kron(a * c, b * d).matrix();
        EXPECT_LT(max_abs(Mat4(lhs - rhs)), 1e-12);
        // Bilinearity in the left slot.
        const Operator2 sum{a.m + 2.0 * c.m};
        EXPECT_LT(max_abs(Mat4(kron(sum, b).matrix() - kron(a, b).matrix() - 2.0 * kron(c, b).matrix())), 1e-12);
    }
}

TEST(spin_algebra, rotation_matches_series_exponential) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Vector3d n(u(rng), u(rng), u(rng));
        n.normalize();
        const double angle = 4 * kPi * u(rng);
        const Mat2 gen = n(0) * spin_x().m + n(1) * spin_y().m + n(2) * spin_z().m;
        const Mat2 oracle = Mat2(Complex(0, -angle) * gen).exp();
        EXPECT_LT(max_abs(Mat2(spin_rotation(n(0), n(1), n(2), angle).m - oracle)), 1e-12);
    }
}

TEST(spin_algebra, unitary_constructor_rejects_non_unitary) {
    Mat4 m = Mat4::Identity();
    m(0, 0) = 1.001;
    EXPECT_THROW(Operator4::unitary(m), NonUnitaryOperator);
    EXPECT_FALSE(Operator4::general(m).is_flagged_unitary());
}

TEST(spin_algebra, apply_unitary_identity_and_r1) {
    std::mt19937_64 rng(5);
    const DensityMatrix4 rho(random_density(rng));
    EXPECT_LT(max_abs(Mat4(apply_unitary(Operator4{}, rho).matrix() - rho.matrix())), 1e-15);

    // R1(90 deg) on |00><00|: direct multiplication oracle.
    Mat2 r;
    r << 1, -1, 1, 1;
    r /= std::sqrt(2.0);
    const DensityMatrix4 out = apply_unitary(on_spin_b(Operator2{r}), DensityMatrix4::from_pure(PureState4::basis(0)));
    EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(out(2, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(out(1, 1).real(), 0.0, 1e-15);
    EXPECT_NEAR(out(3, 3).real(), 0.0, 1e-15);
    EXPECT_NEAR(out(2, 0).real(), 0.5, 1e-15);
}

TEST(spin_algebra, apply_unitary_rejects_unflagged) {
    const DensityMatrix4 rho = DensityMatrix4::maximally_mixed();
    EXPECT_THROW(apply_unitary(Operator4::general(Mat4::Identity()), rho), NonUnitaryOperator);
}

TEST(spin_algebra, apply_unitary_preserves_trace_and_spectrum) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const Operator4 u = Operator4::unitary(random_unitary(rng));
        const DensityMatrix4 rho(random_density(rng));
        const DensityMatrix4 out = apply_unitary(u, rho);
        EXPECT_LT(std::abs(out.matrix().trace() - 1.0), 1e-12);
        EXPECT_LT(max_abs(Mat4(out.matrix() - out.matrix().adjoint())), 1e-12);
        Eigen::SelfAdjointEigenSolver<Mat4> before(rho.matrix()), after(out.matrix());
        EXPECT_LT((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(spin_algebra, density_matrix_rejects_invalid) {
    Mat4 bad = Mat4::Identity() / 4.0;
    bad(0, 0) += 0.1;
    EXPECT_THROW(DensityMatrix4{bad}, InvalidState);  // trace
    Mat4 neg = Mat4::Zero();
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix4{neg}, InvalidState);  // negative eigenvalue
    Mat4 nonherm = Mat4::Identity() / 4.0;
    nonherm(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix4{nonherm}, InvalidState);
    EXPECT_THROW(PureState4(amplitudes(1, 1, 0, 0)), InvalidState);
}

TEST(spin_algebra, global_phase_distance) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const Operator4 u = Operator4::unitary(random_unitary(rng));
        const Operator4 lu = Operator4::unitary(std::polar(1.0, ph(rng)) * u.matrix());
        EXPECT_LT(distance_up_to_global_phase(u, lu), 1e-12);
    }
    const Operator4 u = Operator4::unitary(random_unitary(rng));
    EXPECT_EQ(distance_up_to_global_phase(u, u), 0.0);
    EXPECT_LT(distance_up_to_global_phase(u, Operator4::unitary(std::polar(1.0, kPi / 3) * u.matrix())), 1e-12);
}

TEST(spin_algebra, global_phase_distance_mismatch_matches_scan) {
    const Operator4 e;
    const Operator4 x = Operator4::unitary(sigma_x_on_b());
    const double d = distance_up_to_global_phase(e, x);
    EXPECT_GE(d, 1.0);
    EXPECT_NEAR(scanned_global_distance(e.matrix(), x.matrix()), 1.0, 1e-12);
}

TEST(spin_algebra, diagonal_phase_distance) {
    Mat4 cn = Mat4::Zero();
    cn(0, 0) = cn(1, 1) = cn(2, 3) = cn(3, 2) = 1;
    const Operator4 cnot = Operator4::unitary(cn);

    const DiagonalPhaseMatch same = distance_up_to_diagonal_phase(cnot, cnot);
    EXPECT_EQ(same.distance, 0.0);
    for (double p : same.phases) EXPECT_EQ(p, 0.0);

    Mat4 d = Mat4::Identity();
    d(0, 0) = Complex(0, 1);
    const DiagonalPhaseMatch shifted = distance_up_to_diagonal_phase(Operator4::unitary(d * cn), cnot);
    EXPECT_LT(shifted.distance, 1e-15);
    EXPECT_NEAR(shifted.phases[0], kPi / 2, 1e-15);
    EXPECT_NEAR(shifted.phases[1], 0, 1e-15);
    EXPECT_NEAR(shifted.phases[2], 0, 1e-15);
    EXPECT_NEAR(shifted.phases[3], 0, 1e-15);

    // Mismatch: brute-force grid of four phases at pi/8 resolution never
    // brings E within 1 of CN.
    const DiagonalPhaseMatch mismatch = distance_up_to_diagonal_phase(Operator4{}, cnot);
    EXPECT_GE(mismatch.distance, 1.0);
    double best = INFINITY;
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b)
            for (int c = 0; c < 16; ++c)
                for (int e = 0; e < 16; ++e) {
                    const Eigen::Vector4cd ph(std::polar(1.0, a * kPi / 8), std::polar(1.0, b * kPi / 8),
                                              std::polar(1.0, c * kPi / 8), std::polar(1.0, e * kPi / 8));
                    best = std::min(best, max_abs(Mat4(Mat4::Identity() - cn * ph.asDiagonal())));
                }
    EXPECT_GE(best, 1.0);
}

TEST(spin_algebra, distance_incomparable) {
    const Operator4 e;
    EXPECT_THROW(distance_up_to_global_phase(e, Operator4::general(Mat4::Zero())), Incomparable);
}

TEST(spin_algebra, exp_diagonal_is_per_entry) {
    const Operator4 u = exp_diagonal(Eigen::Vector4d(1, -2, 3, 0.5), 0.7);
    EXPECT_LT(std::abs(u(1, 1) - std::polar(1.0, 1.4)), 1e-15);
    EXPECT_TRUE(u.is_flagged_unitary());
}
