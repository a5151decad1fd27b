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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "twopath/errors.h"

namespace twopath {

namespace {

constexpr double kIncomparableFloor = 1e-14;

bool all_finite(const Mat4& m) {
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

Complex unit_phase(Complex z) { return z / std::abs(z); }

}  // namespace

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }
double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

double unitarity_error(const Mat4& u) { return max_abs(Mat4(u.adjoint() * u - Mat4::Identity())); }
double unitarity_error(const Mat2& u) { return max_abs(Mat2(u.adjoint() * u - Mat2::Identity())); }

Operator2 spin_x() {
    Mat2 m;
    m << 0, 0.5, 0.5, 0;
    return {m};
}

Operator2 spin_y() {
    Mat2 m;
    m << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
    return {m};
}

Operator2 spin_z() {
    Mat2 m;
    m << 0.5, 0, 0, -0.5;
    return {m};
}

Operator2 spin_rotation(double nx, double ny, double nz, double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const Complex i(0, 1);
    // n . sigma = [[nz, nx - i ny], [nx + i ny, -nz]]
    Mat2 m;
    m << c - i * s * nz, -i * s * Complex(nx, -ny),
         -i * s * Complex(nx, ny), c + i * s * nz;
    return {m};
}

Operator4::Operator4() : m_(Mat4::Identity()), unitary_(true) {}

Operator4 Operator4::general(const Mat4& m) { return Operator4(m, false); }

Operator4 Operator4::unitary(const Mat4& m) {
    if (!all_finite(m)) {
        throw NonUnitaryOperator("operator has non-finite entries");
    }
    const double err = unitarity_error(m);
    if (!(err < kExactTolerance)) {
        std::ostringstream msg;
        msg << "operator is not unitary: ||U^dag U - E||_max = " << err;
        throw NonUnitaryOperator(msg.str());
    }
    return Operator4(m, true);
}

Operator4 Operator4::adjoint() const { return Operator4(m_.adjoint(), unitary_); }

Operator4 operator*(const Operator4& x, const Operator4& y) {
    Mat4 p = x.m_ * y.m_;
    const bool unitary = x.unitary_ && y.unitary_ && unitarity_error(p) < kExactTolerance;
    return Operator4(p, unitary);
}

Operator4 kron(const Operator2& on_b, const Operator2& on_a) {
    Mat4 m;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    m(2 * i + k, 2 * j + l) = on_b.m(i, j) * on_a.m(k, l);
                }
            }
        }
    }
    if (unitarity_error(on_b.m) < kExactTolerance && unitarity_error(on_a.m) < kExactTolerance &&
        unitarity_error(m) < kExactTolerance) {
        return Operator4::unitary(m);
    }
    return Operator4::general(m);
}

Operator4 on_spin_b(const Operator2& op) { return kron(op, Operator2::identity()); }
Operator4 on_spin_a(const Operator2& op) { return kron(Operator2::identity(), op); }

Operator4 exp_diagonal(const Eigen::Vector4d& generator, double t) {
    Mat4 m = Mat4::Zero();
    for (int k = 0; k < 4; ++k) {
        m(k, k) = std::polar(1.0, -generator(k) * t);
    }
    return Operator4::unitary(m);
}

PureState4::PureState4(const Vec4& amplitudes) : c_(amplitudes) {
    const double norm = c_.squaredNorm();
    if (!std::isfinite(norm) || std::abs(norm - 1) >= kExactTolerance) {
        throw InvalidState("pure state is not normalized");
    }
}

PureState4 PureState4::basis(int index) {
    if (index < 0 || index > 3) {
        throw std::out_of_range("basis index must be in 0..3");
    }
    Vec4 c = Vec4::Zero();
    c(index) = 1;
    return PureState4(c);
}

bool StateCheck::ok() const {
    return hermiticity_error < kExactTolerance && trace_error < kExactTolerance &&
           min_eigenvalue >= -kSpectralTolerance;
}

StateCheck check_state(const Mat4& rho) {
    StateCheck out;
    if (!all_finite(rho)) {
        out.hermiticity_error = out.trace_error = INFINITY;
        out.min_eigenvalue = -INFINITY;
        return out;
    }
    out.hermiticity_error = max_abs(Mat4(rho - rho.adjoint()));
    out.trace_error = std::abs(rho.trace() - 1.0);
    const Mat4 herm = (rho + rho.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat4> solver(herm, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = solver.eigenvalues().minCoeff();
    return out;
}

DensityMatrix4::DensityMatrix4(const Mat4& rho) : rho_(rho) {
    const StateCheck c = check_state(rho_);
    if (!c.ok()) {
        std::ostringstream msg;
        msg << "invalid density matrix (hermiticity " << c.hermiticity_error << ", trace "
            << c.trace_error << ", min eigenvalue " << c.min_eigenvalue << ")";
        throw InvalidState(msg.str());
    }
}

DensityMatrix4 DensityMatrix4::from_pure(const PureState4& psi) {
    const Vec4& c = psi.amplitudes();
    return DensityMatrix4(Mat4(c * c.adjoint()));
}

DensityMatrix4 DensityMatrix4::maximally_mixed() { return DensityMatrix4(Mat4(Mat4::Identity() / 4.0)); }

DensityMatrix4 apply_unitary(const Operator4& u, const DensityMatrix4& rho) {
    if (!u.is_flagged_unitary()) {
        throw NonUnitaryOperator("apply_unitary requires a unitary operator");
    }
    const double err = unitarity_error(u.matrix());
    if (!(err < kExactTolerance)) {
        throw NonUnitaryOperator("apply_unitary: operator failed the unitarity check");
    }
    return DensityMatrix4(Mat4(u.matrix() * rho.matrix() * u.matrix().adjoint()));
}

double distance_up_to_global_phase(const Operator4& u, const Operator4& v) {
    const Mat4 overlap = v.matrix().adjoint() * u.matrix();
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    const double largest = overlap.cwiseAbs().maxCoeff(&row, &col);
    if (largest < kIncomparableFloor) {
        throw Incomparable("V^dag U vanishes; no phase reference");
    }
    const Complex lambda = unit_phase(overlap(row, col));
    return max_abs(Mat4(u.matrix() - lambda * v.matrix()));
}

DiagonalPhaseMatch distance_up_to_diagonal_phase(const Operator4& u, const Operator4& v) {
    const Mat4 overlap = v.matrix().adjoint() * u.matrix();
    Mat4 d = Mat4::Zero();
    DiagonalPhaseMatch out;
    for (int j = 0; j < 4; ++j) {
        Eigen::Index row = 0;
        const double largest = overlap.col(j).cwiseAbs().maxCoeff(&row);
        if (largest < kIncomparableFloor) {
            throw Incomparable("column of V^dag U vanishes; no phase reference");
        }
        const Complex lambda = unit_phase(overlap(row, j));
        d(j, j) = lambda;
        out.phases[j] = std::arg(lambda);
    }
    out.distance = max_abs(Mat4(u.matrix() - v.matrix() * d));
    return out;
}

void InvariantTracker::observe(const DensityMatrix4& rho) {
    const StateCheck c = rho.check();
    max_hermiticity_error = std::max(max_hermiticity_error, c.hermiticity_error);
    max_trace_error = std::max(max_trace_error, c.trace_error);
    min_eigenvalue = std::min(min_eigenvalue, c.min_eigenvalue);
    ++states_seen;
}

void InvariantTracker::observe(const Operator4& u) {
    max_unitarity_error = std::max(max_unitarity_error, unitarity_error(u.matrix()));
    ++operators_seen;
}

void InvariantTracker::merge(const InvariantTracker& other) {
    max_hermiticity_error = std::max(max_hermiticity_error, other.max_hermiticity_error);
    max_trace_error = std::max(max_trace_error, other.max_trace_error);
    min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
    max_unitarity_error = std::max(max_unitarity_error, other.max_unitarity_error);
    states_seen += other.states_seen;
    operators_seen += other.operators_seen;
}

bool InvariantTracker::ok() const {
    return max_hermiticity_error < kExactTolerance && max_trace_error < kExactTolerance &&
           min_eigenvalue >= -kSpectralTolerance && max_unitarity_error < kExactTolerance;
}

}  // namespace twopath
