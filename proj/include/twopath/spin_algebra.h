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

#ifndef TWOPATH_SPIN_ALGEBRA_H
#define TWOPATH_SPIN_ALGEBRA_H

#include <array>
#include <complex>

#include <Eigen/Core>

namespace twopath {

// Two-spin Hilbert space. Basis index is 2*b + a: spin b (observed, 13C)
// occupies the left tensor slot, spin a (marker, 1H) the right one, so the
// order is |00>, |01>, |10>, |11> with the first label belonging to b.

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kSpectralTolerance = 1e-10;

/// Largest absolute entry.
double max_abs(const Mat4& m);
double max_abs(const Mat2& m);

/// ||U^dag U - I||_max.
double unitarity_error(const Mat4& u);
double unitarity_error(const Mat2& u);

struct Operator2 {
    Mat2 m = Mat2::Identity();

    static Operator2 identity() { return {}; }
    Operator2 adjoint() const { return {m.adjoint()}; }
    friend Operator2 operator*(const Operator2& x, const Operator2& y) { return {x.m * y.m}; }
};

/// Spin-1/2 operators I_x, I_y, I_z (Pauli matrices over two).
Operator2 spin_x();
Operator2 spin_y();
Operator2 spin_z();

/// exp(-i angle (n . I)) for a unit vector n, in closed form
/// cos(angle/2) I - i sin(angle/2) (n . sigma).
Operator2 spin_rotation(double nx, double ny, double nz, double angle);

/// 4x4 operator on the two-spin space. The unitary flag is only set by
/// constructors that have verified ||U^dag U - E||_max < 1e-12.
class Operator4 {
 public:
    /// The identity E (flagged unitary).
    Operator4();

    /// Unchecked general operator; unitary flag unset.
    static Operator4 general(const Mat4& m);
    /// Throws NonUnitaryOperator when the check fails.
    static Operator4 unitary(const Mat4& m);

    const Mat4& matrix() const { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }
    bool is_flagged_unitary() const { return unitary_; }

    Operator4 adjoint() const;

    /// Product; the result carries the unitary flag iff both factors do and
    /// the product still passes the check.
    friend Operator4 operator*(const Operator4& x, const Operator4& y);

 private:
    Operator4(const Mat4& m, bool unitary) : m_(m), unitary_(unitary) {}

    Mat4 m_;
    bool unitary_;
};

/// (left ⊗ right) with left acting on spin b and right on spin a:
/// (A⊗B)[2i+k][2j+l] = A[i][j] B[k][l].
Operator4 kron(const Operator2& on_b, const Operator2& on_a);
Operator4 on_spin_b(const Operator2& op);
Operator4 on_spin_a(const Operator2& op);

/// diag(exp(-i g_k t)) for a real diagonal generator g.
Operator4 exp_diagonal(const Eigen::Vector4d& generator, double t);

class PureState4 {
 public:
    /// Throws InvalidState unless sum |c_i|^2 = 1 within 1e-12.
    explicit PureState4(const Vec4& amplitudes);
    static PureState4 basis(int index);

    const Vec4& amplitudes() const { return c_; }
    Complex operator[](int index) const { return c_(index); }

 private:
    Vec4 c_;
};

/// Worst-case violations seen on a density matrix.
struct StateCheck {
    double hermiticity_error = 0;
    double trace_error = 0;
    double min_eigenvalue = 0;

    bool ok() const;
};

StateCheck check_state(const Mat4& rho);

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix. Every
/// constructor validates; an invalid matrix never exists as this type.
class DensityMatrix4 {
 public:
    /// Throws InvalidState.
    explicit DensityMatrix4(const Mat4& rho);
    static DensityMatrix4 from_pure(const PureState4& psi);
    static DensityMatrix4 maximally_mixed();

    const Mat4& matrix() const { return rho_; }
    Complex operator()(int row, int col) const { return rho_(row, col); }
    StateCheck check() const { return check_state(rho_); }

 private:
    Mat4 rho_;
};

/// U rho U^dag. Throws NonUnitaryOperator if U is not flagged unitary or
/// fails the unitarity check.
DensityMatrix4 apply_unitary(const Operator4& u, const DensityMatrix4& rho);

/// min over |lambda| = 1 of ||U - lambda V||_max, with lambda taken from the
/// largest-magnitude entry of V^dag U. Throws Incomparable when every entry
/// of V^dag U is below 1e-14.
double distance_up_to_global_phase(const Operator4& u, const Operator4& v);

struct DiagonalPhaseMatch {
    double distance = 0;
    /// Phase of each column of V^dag U, in (-pi, pi]; U ≈ V · diag(e^{i phase}).
    std::array<double, 4> phases{};
};

DiagonalPhaseMatch distance_up_to_diagonal_phase(const Operator4& u, const Operator4& v);

/// Running record of the worst invariant violations seen along a pipeline.
struct InvariantTracker {
    double max_hermiticity_error = 0;
    double max_trace_error = 0;
    double min_eigenvalue = 1;
    double max_unitarity_error = 0;
    int states_seen = 0;
    int operators_seen = 0;

    void observe(const DensityMatrix4& rho);
    void observe(const Operator4& u);
    void merge(const InvariantTracker& other);
    bool ok() const;
};

}  // namespace twopath

#endif  // TWOPATH_SPIN_ALGEBRA_H
