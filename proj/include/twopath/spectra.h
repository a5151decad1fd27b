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

#ifndef TWOPATH_SPECTRA_H
#define TWOPATH_SPECTRA_H

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "twopath/measurement.h"
#include "twopath/pulse_engine.h"
#include "twopath/spin_algebra.h"

namespace twopath {

/// Acquisition parameters. Line centres sit at offset -/+ J/2 for partner
/// state 0/1 of each observed nucleus.
struct FidParams {
    double dwell_time = 1e-3;
    int n_points = 4096;
    double t2 = 0.5;
    double offset_b_hz = 0;
    double offset_a_hz = 0;

    /// Throws std::invalid_argument unless dwell_time > 0, t2 > 0 and
    /// n_points is a power of two >= 256.
    void validate() const;
};

struct ErrorModel {
    /// Relative std-dev of the per-shot RF flip-angle scale.
    double rf_scale_sigma = 0;
    /// Std-dev of the additive Gaussian noise on each FID component.
    double noise_sigma = 0;
    int n_shots = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SpectrumLine {
    double frequency_hz = 0;
    Complex amplitude;
    /// Full width at half maximum, 1 / (pi t2); informational, decay comes from FidParams.
    double linewidth_hz = 0;
};

using ComplexSeries = std::vector<Complex>;

double line_frequency(ObservedSpin spin, int partner, const SpinSystem& system, const FidParams& params);

/// The two lines of one observed nucleus.
std::vector<SpectrumLine> spectrum_lines(const LineAmplitudeSet& amplitudes, ObservedSpin spin,
                                         const SpinSystem& system, const FidParams& params);

/// s(t_k) = sum_m A_m exp(i 2 pi nu_m t_k - t_k / t2), t_k = k dwell.
ComplexSeries synthesize_fid(std::span<const SpectrumLine> lines, const FidParams& params);

/// Unnormalized forward DFT, X_k = sum_n x_n exp(-2 pi i k n / N).
/// Throws std::invalid_argument unless the length is a power of two.
ComplexSeries dft_spectrum(std::span<const Complex> fid);

/// Frequency of bin k: k / (N dt), wrapped to [-1/(2 dt), 1/(2 dt)).
double bin_frequency(int k, int n_points, double dwell_time);

/// Linear least-squares fit of complex Lorentzians at known frequencies;
/// returns A_m, the FID amplitude of each line. The lineshape is the exact
/// DFT of the sampled decay, (1 - r^N) / (1 - r e^{-2 pi i k/N}) with
/// r = exp((i 2 pi nu_m - 1/t2) dt), which near resonance is the familiar
///   X(f) = A_m (t2/dt) / (1 + i 2 pi (f - nu_m) t2)
/// and also accounts for aliased tails and the first-sample offset.
/// Throws IllConditioned if two lines are closer than three linewidths or
/// the design matrix condition number exceeds 1e8.
std::vector<Complex> fit_lines(std::span<const Complex> spectrum, std::span<const double> expected_freqs,
                               double t2, double dwell_time);

/// fit_lines with the design factored once, for repeated fits at fixed
/// frequencies and acquisition parameters.
class LineFitter {
 public:
    /// Throws IllConditioned as fit_lines does.
    LineFitter(std::span<const double> expected_freqs, double t2, double dwell_time, int n_points);

    std::vector<Complex> fit(std::span<const Complex> spectrum) const;

 private:
    int n_points_;
    /// (A^H A)^{-1} A^H, one row per line.
    Eigen::MatrixXcd projector_;
};

/// One shot of an acquisition: the reference (initial) state, the state
/// before readout, and the readout sequence, all produced with the shot's
/// RF scale already applied.
struct ShotStates {
    DensityMatrix4 reference;
    DensityMatrix4 final_state;
    PulseSequence readout;
};

using ShotPipeline = std::function<ShotStates(double rf_scale, InvariantTracker* tracker)>;

struct NoisyEstimate {
    ObservableArray mean{};
    ObservableArray standard_error{};
    int shots = 0;
};

/// Full spectral route for one state pair: readout, FID synthesis, optional
/// noise, DFT, fit, normalization against the reference spectrum.
ObservableArray spectral_observables(const ShotStates& states, const SpinSystem& system, const FidParams& params,
                                     const QuadratureTable& table, double noise_sigma,
                                     std::function<double()> gaussian, InvariantTracker* tracker = nullptr);

/// Monte-Carlo over n_shots. Shot s draws g ~ Normal(1, rf_scale_sigma) and
/// noise from an engine seeded with (seed, stream, s), so results do not
/// depend on execution order.
NoisyEstimate run_noisy_experiment(const ShotPipeline& pipeline, const ErrorModel& error, const SpinSystem& system,
                                   const FidParams& params, const QuadratureTable& table, std::uint64_t stream,
                                   InvariantTracker* tracker = nullptr);

/// CSV exports: `index,time_s,re,im` and `bin,freq_hz,re,im`.
void write_fid_csv(std::ostream& out, std::span<const Complex> fid, double dwell_time);
void write_spectrum_csv(std::ostream& out, std::span<const Complex> spectrum, double dwell_time);

}  // namespace twopath

#endif  // TWOPATH_SPECTRA_H
