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

#include "twopath/spectra.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <mutex>
#include <random>
#include <stdexcept>

#include <fftw3.h>

#include <Eigen/Dense>

#include "twopath/errors.h"

namespace twopath {

namespace {

using std::numbers::pi;

constexpr double kMaxCondition = 1e8;

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// The FFTW planner is not thread-safe; execution on private buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
 public:
    FftPlan() = default;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() { release(); }

    void resize(int n) {
        if (n == n_) return;
        release();
        std::lock_guard<std::mutex> lock(planner_mutex());
        in_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        n_ = n;
    }

    ComplexSeries forward(std::span<const Complex> x) {
        std::copy(x.begin(), x.end(), reinterpret_cast<Complex*>(in_));
        fftw_execute(plan_);
        const Complex* y = reinterpret_cast<const Complex*>(out_);
        return ComplexSeries(y, y + n_);
    }

 private:
    void release() {
        if (n_ == 0) return;
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
        n_ = 0;
    }

    int n_ = 0;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

std::string csv_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

struct Acquisition {
    const SpinSystem& system;
    const FidParams& params;
    std::array<LineFitter, 2> fitters;  // indexed by ObservedSpin

    static LineFitter fitter_for(ObservedSpin spin, const SpinSystem& system, const FidParams& params) {
        const std::array<double, 2> freqs{line_frequency(spin, 0, system, params),
                                          line_frequency(spin, 1, system, params)};
        return LineFitter(freqs, params.t2, params.dwell_time, params.n_points);
    }

    Acquisition(const SpinSystem& s, const FidParams& p)
        : system(s), params(p), fitters{fitter_for(ObservedSpin::kB, s, p), fitter_for(ObservedSpin::kA, s, p)} {}

    LineAmplitudeSet acquire(const LineAmplitudeSet& ideal, double noise_sigma,
                             const std::function<double()>& gaussian) const {
        LineAmplitudeSet recovered;
        for (ObservedSpin spin : {ObservedSpin::kB, ObservedSpin::kA}) {
            const std::vector<SpectrumLine> lines = spectrum_lines(ideal, spin, system, params);
            ComplexSeries fid = synthesize_fid(lines, params);
            if (noise_sigma > 0) {
                for (Complex& s : fid) {
                    const double re = gaussian();
                    const double im = gaussian();
                    s += noise_sigma * Complex(re, im);
                }
            }
            const std::vector<Complex> amps = fitters[static_cast<int>(spin)].fit(dft_spectrum(fid));
            recovered.at(spin, 0) = amps[0];
            recovered.at(spin, 1) = amps[1];
        }
        return recovered;
    }

    ObservableArray observables(const ShotStates& states, const QuadratureTable& table, double noise_sigma,
                                const std::function<double()>& gaussian, InvariantTracker* tracker) const {
        const LineAmplitudeSet ref = acquire(line_amplitudes(states.reference, states.readout, tracker), noise_sigma,
                                             gaussian);
        const LineAmplitudeSet fin = acquire(line_amplitudes(states.final_state, states.readout, tracker),
                                             noise_sigma, gaussian);
        return observables_from_lines(fin, reference_scale(ref, table), table);
    }
};

}  // namespace

void FidParams::validate() const {
    if (!(dwell_time > 0) || !(t2 > 0)) throw std::invalid_argument("dwell time and t2 must be positive");
    if (n_points < 256 || !is_power_of_two(static_cast<std::size_t>(n_points))) {
        throw std::invalid_argument("FID length must be a power of two >= 256");
    }
    if (!std::isfinite(offset_a_hz) || !std::isfinite(offset_b_hz)) {
        throw std::invalid_argument("offsets must be finite");
    }
}

void ErrorModel::validate() const {
    if (!(rf_scale_sigma >= 0) || !(noise_sigma >= 0)) throw std::invalid_argument("error sigmas must be >= 0");
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
}

double line_frequency(ObservedSpin spin, int partner, const SpinSystem& system, const FidParams& params) {
    const double offset = spin == ObservedSpin::kB ? params.offset_b_hz : params.offset_a_hz;
    return offset + (partner == 0 ? -0.5 : 0.5) * system.j_coupling_hz;
}

std::vector<SpectrumLine> spectrum_lines(const LineAmplitudeSet& amplitudes, ObservedSpin spin,
                                         const SpinSystem& system, const FidParams& params) {
    std::vector<SpectrumLine> out;
    for (int partner = 0; partner < 2; ++partner) {
        out.push_back({line_frequency(spin, partner, system, params), amplitudes.at(spin, partner),
                       1 / (pi * params.t2)});
    }
    return out;
}

ComplexSeries synthesize_fid(std::span<const SpectrumLine> lines, const FidParams& params) {
    params.validate();
    ComplexSeries fid(static_cast<std::size_t>(params.n_points), Complex(0));
    // Exact exponentials every kResync points, recurrence in between.
    constexpr int kResync = 64;
    for (const SpectrumLine& line : lines) {
        const Complex rate(-1 / params.t2, 2 * pi * line.frequency_hz);
        const Complex step = std::exp(rate * params.dwell_time);
        Complex term;
        for (int k = 0; k < params.n_points; ++k) {
            if (k % kResync == 0) {
                term = line.amplitude * std::exp(rate * (k * params.dwell_time));
            } else {
                term *= step;
            }
            fid[k] += term;
        }
    }
    return fid;
}

ComplexSeries dft_spectrum(std::span<const Complex> fid) {
    if (!is_power_of_two(fid.size())) throw std::invalid_argument("DFT length must be a power of two");
    thread_local FftPlan plan;
    plan.resize(static_cast<int>(fid.size()));
    return plan.forward(fid);
}

double bin_frequency(int k, int n_points, double dwell_time) {
    const int wrapped = k < n_points / 2 ? k : k - n_points;
    return wrapped / (n_points * dwell_time);
}

LineFitter::LineFitter(std::span<const double> expected_freqs, double t2, double dwell_time, int n_points)
    : n_points_(n_points) {
    const int m = static_cast<int>(expected_freqs.size());
    const double linewidth = 1 / (pi * t2);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (std::abs(expected_freqs[i] - expected_freqs[j]) < 3 * linewidth) {
                throw IllConditioned("lines closer than three linewidths cannot be separated");
            }
        }
    }
    // Each column is the DFT of a unit-amplitude sampled decay over the finite
    // record: a Lorentzian summed over its aliases, (1 - r^N) / (1 - r w^-k).
    // Near resonance it reduces to (t2/dt) / (1 + i 2 pi (f - nu) t2).
    Eigen::MatrixXcd design(n_points, m);
    for (int j = 0; j < m; ++j) {
        const Complex r = std::exp(Complex(-dwell_time / t2, 2 * pi * expected_freqs[j] * dwell_time));
        const Complex truncation = 1.0 - std::pow(r, n_points);
        for (int k = 0; k < n_points; ++k) {
            design(k, j) = truncation / (1.0 - r * std::polar(1.0, -2 * pi * k / n_points));
        }
    }
    const Eigen::MatrixXcd gram = design.adjoint() * design;
    if (m > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(lo > 0) || std::sqrt(hi / lo) > kMaxCondition) {
            throw IllConditioned("Lorentzian design matrix is ill-conditioned");
        }
    }
    projector_ = gram.ldlt().solve(Eigen::MatrixXcd(design.adjoint()));
}

std::vector<Complex> LineFitter::fit(std::span<const Complex> spectrum) const {
    if (static_cast<int>(spectrum.size()) != n_points_) {
        throw std::invalid_argument("spectrum length does not match the fitter");
    }
    const Eigen::Map<const Eigen::VectorXcd> y(spectrum.data(), n_points_);
    const Eigen::VectorXcd a = projector_ * y;
    return {a.data(), a.data() + a.size()};
}

std::vector<Complex> fit_lines(std::span<const Complex> spectrum, std::span<const double> expected_freqs,
                               double t2, double dwell_time) {
    if (expected_freqs.empty()) return {};
    return LineFitter(expected_freqs, t2, dwell_time, static_cast<int>(spectrum.size())).fit(spectrum);
}

ObservableArray spectral_observables(const ShotStates& states, const SpinSystem& system, const FidParams& params,
                                     const QuadratureTable& table, double noise_sigma,
                                     std::function<double()> gaussian, InvariantTracker* tracker) {
    params.validate();
    return Acquisition(system, params).observables(states, table, noise_sigma, gaussian, tracker);
}

NoisyEstimate run_noisy_experiment(const ShotPipeline& pipeline, const ErrorModel& error, const SpinSystem& system,
                                   const FidParams& params, const QuadratureTable& table, std::uint64_t stream,
                                   InvariantTracker* tracker) {
    error.validate();
    params.validate();
    const int n = error.n_shots;
    const Acquisition acquisition(system, params);
    std::vector<ObservableArray> shots(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        std::seed_seq seq{static_cast<std::uint32_t>(error.seed), static_cast<std::uint32_t>(error.seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          static_cast<std::uint32_t>(s)};
        std::mt19937_64 engine(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double g = 1 + error.rf_scale_sigma * normal(engine);
        const ShotStates states = pipeline(g, tracker);
        shots[s] = acquisition.observables(states, table, error.noise_sigma, [&] { return normal(engine); }, tracker);
    }

    NoisyEstimate out;
    out.shots = n;
    for (int k = 0; k < kObservableCount; ++k) {
        double sum = 0;
        for (const ObservableArray& v : shots) sum += v[k];
        const double mean = sum / n;
        double ss = 0;
        for (const ObservableArray& v : shots) ss += (v[k] - mean) * (v[k] - mean);
        out.mean[k] = mean;
        out.standard_error[k] = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    }
    return out;
}

void write_fid_csv(std::ostream& out, std::span<const Complex> fid, double dwell_time) {
    out << "index,time_s,re,im\n";
    for (std::size_t k = 0; k < fid.size(); ++k) {
        out << k << ',' << csv_number(k * dwell_time) << ',' << csv_number(fid[k].real()) << ','
            << csv_number(fid[k].imag()) << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, std::span<const Complex> spectrum, double dwell_time) {
    out << "bin,freq_hz,re,im\n";
    const int n = static_cast<int>(spectrum.size());
    for (int k = 0; k < n; ++k) {
        out << k << ',' << csv_number(bin_frequency(k, n, dwell_time)) << ',' << csv_number(spectrum[k].real())
            << ',' << csv_number(spectrum[k].imag()) << '\n';
    }
}

}  // namespace twopath
