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

#include "twopath/cli.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "twopath/dataset_io.h"
#include "twopath/errors.h"
#include "twopath/gates.h"
#include "twopath/harness.h"
#include "twopath/state_prep.h"

namespace twopath::cli {

namespace {

using std::numbers::pi;

/// A usage error detected after parsing (conflicting or invalid flags).
class UsageError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

double deg_to_rad(double deg) { return deg * pi / 180; }

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, x);
    return buf;
}

struct SweepFlags {
    std::string scheme = "unmarked";
    double theta_deg = 90;
    int phi_steps = 24;
    std::string gates = "ideal";
    std::string init = "pure";
    double eff_a = 0.2475;
    double eff_b = 0.01;
    double eps_b = 0.01;
    double eps_a = 0.03977;
    double rf_spread = 0;
    double noise_sigma = 0;
    int shots = 64;
    std::uint64_t seed = 0;
    double t2 = 0.5;
    double dwell = 1e-3;
    int n_points = 4096;
    double j_hz = 215.0;
    bool flip_quadrature = false;
};

struct SweepOptions {
    CLI::Option* gates = nullptr;
    CLI::Option* shots = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* eff_a = nullptr;
    CLI::Option* eff_b = nullptr;
    CLI::Option* eps_b = nullptr;
    CLI::Option* eps_a = nullptr;
};

SweepOptions add_sweep_flags(CLI::App* app, SweepFlags& f) {
    SweepOptions o;
    app->add_option("--theta-deg", f.theta_deg, "Preparation rotation angle in degrees");
    app->add_option("--phi-steps", f.phi_steps, "Number of uniform phi points over [0, 2pi)");
    o.gates = app->add_option("--gates", f.gates, "Gate realization")->check(CLI::IsMember({"ideal", "pulse"}));
    app->add_option("--init", f.init, "Initial state")->check(CLI::IsMember({"pure", "effpure", "thermal"}));
    o.eff_a = app->add_option("--eff-a", f.eff_a, "A of the effective pure state");
    o.eff_b = app->add_option("--eff-b", f.eff_b, "B of the effective pure state");
    o.eps_b = app->add_option("--eps-b", f.eps_b, "13C thermal polarization");
    o.eps_a = app->add_option("--eps-a", f.eps_a, "1H thermal polarization");
    app->add_option("--rf-spread", f.rf_spread, "Relative std-dev of the RF flip-angle scale");
    app->add_option("--noise-sigma", f.noise_sigma, "Additive FID noise std-dev");
    o.shots = app->add_option("--shots", f.shots, "Monte-Carlo shots per phi");
    o.seed = app->add_option("--seed", f.seed, "Random seed");
    app->add_option("--t2", f.t2, "Transverse relaxation time (s)");
    app->add_option("--dwell", f.dwell, "FID dwell time (s)");
    app->add_option("--n-points", f.n_points, "FID length (power of two)");
    app->add_option("--j-hz", f.j_hz, "Scalar coupling (Hz)");
    app->add_flag("--flip-quadrature", f.flip_quadrature, "Negate the coherence quadrature sign");
    return o;
}

SweepConfig build_config(const SweepFlags& f, const SweepOptions& o) {
    if (f.phi_steps < 1) throw UsageError("--phi-steps must be >= 1");
    if (f.rf_spread < 0 || f.noise_sigma < 0) throw UsageError("--rf-spread and --noise-sigma must be >= 0");
    if (f.shots < 1) throw UsageError("--shots must be >= 1");
    const bool noisy = f.rf_spread > 0 || f.noise_sigma > 0;
    if (!noisy && (o.shots->count() > 0 || o.seed->count() > 0)) {
        throw UsageError("--shots/--seed given without --rf-spread or --noise-sigma");
    }
    if (f.rf_spread > 0 && o.gates->count() > 0 && f.gates == "ideal") {
        throw UsageError("--rf-spread needs pulse-level gates; conflicts with --gates ideal");
    }
    if (f.init != "effpure" && (o.eff_a->count() > 0 || o.eff_b->count() > 0)) {
        throw UsageError("--eff-a/--eff-b require --init effpure");
    }
    if (f.init != "thermal" && (o.eps_a->count() > 0 || o.eps_b->count() > 0)) {
        throw UsageError("--eps-a/--eps-b require --init thermal");
    }

    SweepConfig c;
    c.theta = deg_to_rad(f.theta_deg);
    c.phi_grid = uniform_phi_grid(f.phi_steps);
    c.scheme = f.scheme == "marked" ? SchemeId::kMarked : SchemeId::kUnmarked;
    c.gate_level = (f.gates == "pulse" || f.rf_spread > 0) ? GateLevel::kPulseCompiled : GateLevel::kIdeal;
    if (f.init == "effpure") {
        c.initial = EffectivePureInit{{f.eff_a, f.eff_b}};
    } else if (f.init == "thermal") {
        c.initial = ThermalInit{{f.eps_b, f.eps_a}};
    }
    c.system.j_coupling_hz = f.j_hz;
    c.fid.t2 = f.t2;
    c.fid.dwell_time = f.dwell;
    c.fid.n_points = f.n_points;
    c.flip_quadrature = f.flip_quadrature;
    if (noisy) c.error = ErrorModel{f.rf_spread, f.noise_sigma, f.shots, f.seed};
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

/// Reads `key = value` lines (# comments) and returns them as long options.
/// Keys already given on the command line are skipped so flags win.
std::vector<std::string> config_args(const std::string& path, CLI::App* sub, const std::vector<std::string>& cmdline) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    std::vector<std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        CLI::Option* opt = sub->get_option_no_throw(flag);
        if (key == "config" || opt == nullptr) throw UsageError("unknown config key '" + key + "'");
        bool on_cmdline = false;
        for (const std::string& a : cmdline) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) on_cmdline = true;
        }
        if (on_cmdline) continue;
        if (opt->get_type_size() == 0) {
            if (value == "true" || value == "1") {
                out.push_back(flag);
            } else if (value != "false" && value != "0") {
                throw UsageError("config key '" + key + "' expects true/false");
            }
        } else {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    return out;
}

std::string theta_label(double theta_deg) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", theta_deg);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string dataset_csv(const SweepDataset& d) {
    std::ostringstream s;
    write_csv(s, d);
    return s.str();
}

std::vector<ResidualReport> figure_reports(const SweepDataset& d, Figure figure) {
    using O = Observable;
    std::vector<ResidualReport> reports;
    if (figure == Figure::kFig2) {
        reports.push_back(compare(d, {Figure::kFig2, TheoryForm::kDerived, false, {O::kP00, O::kP10}}));
        reports.push_back(compare(d, {Figure::kFig2, TheoryForm::kCaption, false, {O::kP00, O::kP10}}));
        reports.push_back(compare(d, {Figure::kFig2, TheoryForm::kCaption, true, {O::kP00, O::kP10}}));
    } else {
        reports.push_back(compare(
            d, {Figure::kFig3, TheoryForm::kDerived, false, {O::kP00, O::kP01, O::kP10, O::kP11, O::kP0b, O::kP1b}}));
        reports.push_back(compare(d, {Figure::kFig4, TheoryForm::kDerived, false, {O::kC0, O::kC1}}));
    }
    return reports;
}

std::string plot_script(Figure figure, const SweepDataset& d, const std::string& csv_name) {
    const bool errors = !d.rows.empty() && d.rows.front().standard_error.has_value();
    const int fig = static_cast<int>(figure);
    std::ostringstream s;
    s << "# gnuplot script: figure " << fig << ", theta = " << csv_number(d.config.theta * 180 / pi) << " deg\n";
    s << "set datafile separator ','\n";
    s << "set key outside right\n";
    s << "set xlabel 'phi (rad)'\n";
    s << "set xrange [0:2*pi]\n";
    s << "theta = " << csv_number(d.config.theta) << "\n";
    s << "set ylabel '" << (figure == Figure::kFig4 ? "coherence" : "normalized population") << "'\n";

    std::vector<std::pair<int, std::string>> columns;
    if (figure == Figure::kFig2) {
        columns = {{2, "p00"}, {4, "p10"}};
    } else if (figure == Figure::kFig3) {
        columns = {{2, "p00"}, {3, "p01"}, {4, "p10"}, {5, "p11"}, {6, "p0b"}, {7, "p1b"}};
    } else {
        columns = {{8, "c0"}, {9, "c1"}};
    }
    std::vector<std::string> items;
    for (const auto& [col, name] : columns) {
        std::ostringstream item;
        item << "'" << csv_name << "' every ::1 using 1:" << col;
        if (errors) item << ":" << col + 8 << " with yerrorbars";
        else item << " with points";
        item << " title '" << name << "'";
        items.push_back(item.str());
    }
    if (figure == Figure::kFig2) {
        items.push_back("0.5*(1+sin(theta)*cos(x)) with lines dt 1 title 'derived p00'");
        items.push_back("0.5*(1-sin(theta)*cos(x)) with lines dt 1 title 'derived p10'");
        items.push_back("0.5*(1+sin(theta)*sin(x)) with lines dt 2 title 'caption p00'");
        items.push_back("0.5*(1-sin(theta)*sin(x)) with lines dt 2 title 'caption p10'");
    } else if (figure == Figure::kFig3) {
        items.push_back("0.5*cos(theta/2)**2 with lines title 'caption = derived: p00 = p10'");
        items.push_back("0.5*sin(theta/2)**2 with lines title 'caption = derived: p01 = p11'");
        items.push_back("0.5 with lines title 'caption = derived: p0b = p1b'");
    } else {
        items.push_back("0.5*sin(theta)*sin(x) with lines title 'caption = derived: c0'");
        items.push_back("-0.5*sin(theta)*sin(x) with lines title 'caption = derived: c1'");
    }
    s << "plot ";
    for (std::size_t k = 0; k < items.size(); ++k) {
        s << items[k] << (k + 1 < items.size() ? ", \\\n     " : "\n");
    }
    return s.str();
}

void print_reports(std::ostream& out, const std::vector<ResidualReport>& reports) {
    for (const ResidualReport& r : reports) {
        out << "residual fig" << static_cast<int>(r.figure) << " " << theory_form_name(r.form)
            << (r.fitted_offset ? " (fitted offset)" : "") << ": max_abs " << fmt("%.3e", r.max_abs()) << " rms "
            << fmt("%.3e", r.max_rms()) << "\n";
    }
}

int cmd_verify(std::ostream& out, int points, bool inject_error) {
    bool ok = true;
    AngleRule rule = u_pulse_angles;
    if (inject_error) {
        rule = [](double phi) {
            UPulseAngles a = u_pulse_angles(phi);
            a.theta1 = -a.theta1;
            return a;
        };
    }
    const USweepResult u = verify_u_sequence(points, rule);
    const bool u_ok = u.max_distance < 1e-10;
    out << "U(phi) sequence: " << u.points << " points, max distance " << fmt("%.3e", u.max_distance)
        << (u_ok ? " PASS" : " FAIL") << "\n";
    if (!u_ok) out << "  worst phi " << fmt("%.12g", u.worst_phi) << " rad\n";
    ok = ok && u_ok;

    const DiagonalPhaseMatch c = verify_cnot_sequence(SpinSystem{});
    const bool c_ok = c.distance < 1e-10;
    out << "CNOT sequence: diagonal-phase distance " << fmt("%.3e", c.distance) << (c_ok ? " PASS" : " FAIL")
        << "\n";
    out << "  phases (rad)";
    for (double p : c.phases) out << " " << fmt("%.12g", p);
    out << "\n";
    ok = ok && c_ok;
    return ok ? kExitOk : kExitFailure;
}

int cmd_figure(std::ostream& out, int fig_id, const SweepFlags& flags, const SweepOptions& opts,
               const std::string& out_dir) {
    Figure figure;
    try {
        figure = figure_from_int(fig_id);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    SweepFlags f = flags;
    f.scheme = figure == Figure::kFig2 ? "unmarked" : "marked";
    const SweepConfig config = build_config(f, opts);
    const SweepDataset d = sweep(config);
    const std::vector<ResidualReport> reports = figure_reports(d, figure);

    const std::string stem = "fig" + std::to_string(fig_id) + "_theta" + theta_label(f.theta_deg);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / (stem + ".csv"), dataset_csv(d));
    write_text(dir / (stem + ".json"), sidecar_json(d, reports).dump(2) + "\n");
    write_text(dir / (stem + ".gp"), plot_script(figure, d, stem + ".csv"));

    out << "wrote " << (dir / (stem + ".csv")).string() << ", " << stem << ".json, " << stem << ".gp\n";
    out << "population ratio " << fmt("%.4f", GateParams{config.theta}.population_ratio()) << "\n";
    print_reports(out, reports);
    return kExitOk;
}

int cmd_run(std::ostream& out, const SweepFlags& flags, const SweepOptions& opts, const std::string& out_path) {
    const SweepConfig config = build_config(flags, opts);
    const SweepDataset d = sweep(config);
    std::vector<ResidualReport> reports = figure_reports(d, figure_of(config.scheme));

    std::filesystem::path csv_path(out_path);
    if (csv_path.extension() != ".csv") csv_path += ".csv";
    std::filesystem::path json_path = csv_path;
    json_path.replace_extension(".json");
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    write_text(csv_path, dataset_csv(d));
    write_text(json_path, sidecar_json(d, reports).dump(2) + "\n");

    out << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
    if (config.scheme == SchemeId::kUnmarked) {
        out << "visibility p00 = " << fmt("%.4f", visibility(d, Observable::kP00)) << "\n";
    } else {
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const SweepRow& r : d.rows) {
            lo = std::min(lo, get(r.values, Observable::kP0b));
            hi = std::max(hi, get(r.values, Observable::kP0b));
        }
        out << "marginal variation p0b = " << fmt("%.3e", hi - lo) << "\n";
        out << "coherence amplitude c0 = " << fmt("%.4f", fit_fringe(d, Observable::kC0).amplitude) << "\n";
    }
    if (d.cnot_phases) {
        out << "cnot phases (rad)";
        for (double p : d.cnot_phases->phases) out << " " << fmt("%.6g", p);
        out << "; uncompensated max deviation " << fmt("%.3e", d.cnot_uncompensated_max_deviation) << "\n";
    }
    print_reports(out, reports);
    return kExitOk;
}

int cmd_prep(std::ostream& out, double eps_b, double eps_a) {
    ThermalParams t{eps_b, eps_a};
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    out << format_prep_report(solve_prep_angles(t));
    return kExitOk;
}

int cmd_sequence(std::ostream& out, const std::string& which, double theta_deg, double phi_rad) {
    const SpinSystem system;
    PulseSequence seq;
    if (which == "r1") {
        seq = r1_pulse_sequence(deg_to_rad(theta_deg));
    } else if (which == "cnot") {
        seq = cnot_pulse_sequence(system);
    } else if (which == "u") {
        seq = u_pulse_sequence(phi_rad);
    } else if (which == "readout") {
        seq = readout_sequence();
    } else if (which == "prep") {
        seq = prep_sequence(solve_prep_angles(ThermalParams{}).angles);
    }
    out << to_text(seq);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-spin NMR which-path interferometry simulator", "twopath"};
    app.require_subcommand(1);

    CLI::App* verify = app.add_subcommand("verify", "Check pulse sequences against the ideal gates");
    int verify_points = 721;
    bool inject = false;
    verify->add_option("--points", verify_points, "Number of phi values over [0, 2pi]");
    verify->add_flag("--inject-angle-error", inject, "Negative control: flip the sign of theta1")->group("");

    CLI::App* figure = app.add_subcommand("figure", "Reproduce one figure's dataset, sidecar and plot script");
    int fig_id = 0;
    std::string out_dir = ".";
    SweepFlags fig_flags;
    figure->add_option("fig", fig_id, "Figure number (2, 3 or 4)")->required();
    const SweepOptions fig_opts = add_sweep_flags(figure, fig_flags);
    figure->add_option("--out-dir", out_dir, "Output directory");

    CLI::App* runc = app.add_subcommand("run", "General phi sweep");
    SweepFlags run_flags;
    std::string out_path = "run.csv";
    runc->add_option("--scheme", run_flags.scheme, "marked or unmarked")
        ->check(CLI::IsMember({"marked", "unmarked"}));
    const SweepOptions run_opts = add_sweep_flags(runc, run_flags);
    runc->add_option("--out", out_path, "Dataset CSV path; the JSON sidecar goes next to it");

    CLI::App* prep = app.add_subcommand("prep", "Solve the effective-pure-state preparation angles");
    double prep_eps_b = 0.01;
    double prep_eps_a = 0.03977;
    prep->add_option("--eps-b", prep_eps_b, "13C polarization");
    prep->add_option("--eps-a", prep_eps_a, "1H polarization");

    CLI::App* sequence = app.add_subcommand("sequence", "Print a pulse sequence in text form");
    std::string which;
    double seq_theta_deg = 90;
    double seq_phi = 0;
    sequence->add_option("name", which, "r1, cnot, u, readout or prep")
        ->required()
        ->check(CLI::IsMember({"r1", "cnot", "u", "readout", "prep"}));
    sequence->add_option("--theta-deg", seq_theta_deg, "R1 angle in degrees");
    sequence->add_option("--phi", seq_phi, "U phase in radians");

    for (CLI::App* sub : {verify, figure, runc, prep, sequence}) {
        sub->add_option("--config", "key = value configuration file; flags override it");
    }

    try {
        // Splice config-file values in ahead of the command line.
        std::vector<std::string> full = args;
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] != "--config") continue;
            CLI::App* sub = nullptr;
            for (CLI::App* s : {verify, figure, runc, prep, sequence}) {
                if (!args.empty() && s->get_name() == args[0]) sub = s;
            }
            if (sub == nullptr) break;
            std::vector<std::string> extra = config_args(args[i + 1], sub, args);
            full.insert(full.begin() + 1, extra.begin(), extra.end());
            break;
        }
        std::vector<std::string> reversed(full.rbegin(), full.rend());
        app.parse(reversed);

        if (*verify) return cmd_verify(out, verify_points, inject);
        if (*figure) return cmd_figure(out, fig_id, fig_flags, fig_opts, out_dir);
        if (*runc) return cmd_run(out, run_flags, run_opts, out_path);
        if (*prep) return cmd_prep(out, prep_eps_b, prep_eps_a);
        if (*sequence) return cmd_sequence(out, which, seq_theta_deg, seq_phi);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NoSolution& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const DegenerateInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace twopath::cli
