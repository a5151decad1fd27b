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

#include "twopath/state_prep.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "twopath/errors.h"

namespace twopath {

namespace {

constexpr double kPrepTolerance = 1e-9;
constexpr int kGridSize = 64;
constexpr int kMaxNewtonSteps = 100;

struct Residual {
    double r1 = 0;  // p10 - p11
    double r2 = 0;  // p01 - p11
    double norm() const { return std::max(std::abs(r1), std::abs(r2)); }
};

Residual residual_at(const ThermalParams& thermal, double x, double y) {
    const DensityMatrix4 rho = prepare(thermal, PrepAngles{x, y});
    const double p01 = rho(1, 1).real();
    const double p10 = rho(2, 2).real();
    const double p11 = rho(3, 3).real();
    return {p10 - p11, p01 - p11};
}

}  // namespace

void ThermalParams::validate() const {
    if (!std::isfinite(eps_a) || !std::isfinite(eps_b) || !(std::abs(eps_a) + std::abs(eps_b) < 1)) {
        throw std::invalid_argument("thermal polarizations must satisfy |eps_a| + |eps_b| < 1");
    }
}

void EffectivePureParams::validate() const {
    if (!(a >= 0) || !(b >= 0) || std::abs(4 * a + b - 1) >= kExactTolerance) {
        throw std::invalid_argument("effective pure state requires A, B >= 0 and 4A + B = 1");
    }
}

DensityMatrix4 effective_pure(const EffectivePureParams& params) {
    params.validate();
    Mat4 rho = params.a * Mat4::Identity();
    rho(0, 0) += params.b;
    return DensityMatrix4(rho);
}

DensityMatrix4 thermal_state(const ThermalParams& params) {
    params.validate();
    const double eb = params.eps_b;
    const double ea = params.eps_a;
    Mat4 rho = Mat4::Zero();
    rho(0, 0) = 0.25 + 0.5 * (eb + ea);
    rho(1, 1) = 0.25 + 0.5 * (eb - ea);
    rho(2, 2) = 0.25 + 0.5 * (-eb + ea);
    rho(3, 3) = 0.25 - 0.5 * (eb + ea);
    return DensityMatrix4(rho);
}

PulseSequence prep_sequence(const PrepAngles& angles) {
    PulseSequence seq;
    seq.then(TransitionPulse{{2, 3}, Axis::kPlusY, angles.angle1})
        .then(TransitionPulse{{1, 3}, Axis::kPlusY, angles.angle2})
        .then(GradientCrusher{});
    return seq;
}

DensityMatrix4 prepare(const ThermalParams& thermal, const PrepAngles& angles, InvariantTracker* tracker) {
    return prepare(thermal, angles, 1.0, tracker);
}

DensityMatrix4 prepare(const ThermalParams& thermal, const PrepAngles& angles, double rf_scale,
                       InvariantTracker* tracker) {
    const DensityMatrix4 rho0 = thermal_state(thermal);
    if (tracker) tracker->observe(rho0);
    return run_sequence(scale_flip_angles(prep_sequence(angles), rf_scale), rho0, SpinSystem{}, tracker);
}

PrepSolution solve_prep_angles(const ThermalParams& thermal) {
    thermal.validate();
    if (thermal.eps_a == 0 && thermal.eps_b == 0) {
        throw DegenerateInput("no polarization to redistribute (eps_a = eps_b = 0)");
    }

    // Coarse grid.
    double best_x = 0;
    double best_y = 0;
    double best = INFINITY;
    for (int i = 0; i <= kGridSize; ++i) {
        for (int j = 0; j <= kGridSize; ++j) {
            const double x = std::numbers::pi * i / kGridSize;
            const double y = std::numbers::pi * j / kGridSize;
            const double r = residual_at(thermal, x, y).norm();
            if (r < best) {
                best = r;
                best_x = x;
                best_y = y;
            }
        }
    }

    // Damped Newton with a central-difference Jacobian.
    double x = best_x;
    double y = best_y;
    Residual r = residual_at(thermal, x, y);
    for (int step = 0; step < kMaxNewtonSteps && r.norm() > 1e-15; ++step) {
        const double h = 1e-6;
        const Residual rxp = residual_at(thermal, x + h, y);
        const Residual rxm = residual_at(thermal, x - h, y);
        const Residual ryp = residual_at(thermal, x, y + h);
        const Residual rym = residual_at(thermal, x, y - h);
        const double j11 = (rxp.r1 - rxm.r1) / (2 * h);
        const double j12 = (ryp.r1 - rym.r1) / (2 * h);
        const double j21 = (rxp.r2 - rxm.r2) / (2 * h);
        const double j22 = (ryp.r2 - rym.r2) / (2 * h);
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-300) break;
        const double dx = (j22 * r.r1 - j12 * r.r2) / det;
        const double dy = (-j21 * r.r1 + j11 * r.r2) / det;

        double damping = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving) {
            const double nx = x - damping * dx;
            const double ny = y - damping * dy;
            const Residual nr = residual_at(thermal, nx, ny);
            if (nr.norm() < r.norm()) {
                x = nx;
                y = ny;
                r = nr;
                improved = true;
                break;
            }
            damping /= 2;
        }
        if (!improved) break;
    }

    if (!(r.norm() <= kPrepTolerance)) {
        throw NoSolution("no preparation angles equalize the populations (residual " + std::to_string(r.norm()) +
                         ")");
    }
    // Fold back into [0, pi]; populations depend on sin^2(angle/2) only.
    const auto fold = [](double t) {
        t = std::fmod(std::abs(t), 2 * std::numbers::pi);
        return t > std::numbers::pi ? 2 * std::numbers::pi - t : t;
    };

    PrepSolution out;
    out.angles = {fold(x), fold(y)};
    const DensityMatrix4 rho = prepare(thermal, out.angles);
    const double p01 = rho(1, 1).real();
    const double p10 = rho(2, 2).real();
    const double p11 = rho(3, 3).real();
    out.residual = std::max(std::abs(p01 - p11), std::abs(p10 - p11));
    out.state = infer_effective_pure(rho);
    if (!(out.state.b > 0)) {
        throw NoSolution("prepared state has no excess |00> population (B <= 0)");
    }
    return out;
}

EffectivePureParams infer_effective_pure(const DensityMatrix4& rho) {
    const double a = (rho(1, 1).real() + rho(2, 2).real() + rho(3, 3).real()) / 3;
    return {a, rho(0, 0).real() - a};
}

std::string format_prep_report(const PrepSolution& s) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "angles_rad %.12g %.12g residual %.3e\nA %.12g B %.12g\n", s.angles.angle1,
                  s.angles.angle2, s.residual, s.state.a, s.state.b);
    return buf;
}

}  // namespace twopath
