#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wtrom/harness.hpp"
#include "wtrom/notch.hpp"
#include "wtrom/seqnet.hpp"

namespace h = wtrom::harness;
namespace seqnet = wtrom::seqnet;
using wtrom::Phasor;
using wtrom::Trajectory;

namespace {

// "a,b,c" or "lo:hi:count" (inclusive linear spacing)
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    auto number = [&](const std::string& tok) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || tok.empty())
            throw wtrom::ValidationError("bad number in value list: '" + tok + "'",
                                         "sweep_values");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        size_t start = 0;
        for (size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ':') {
                parts.push_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
        if (parts.size() != 3)
            throw wtrom::ValidationError("range must be lo:hi:count", "sweep_values");
        const double lo = number(parts[0]);
        const double hi = number(parts[1]);
        const double cnt = number(parts[2]);
        const long n = std::lround(cnt);
        if (n < 2 || static_cast<double>(n) != cnt)
            throw wtrom::ValidationError("range count must be an integer >= 2",
                                         "sweep_values");
        for (long i = 0; i < n; ++i)
            out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(n - 1));
        return out;
    }
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            out.push_back(number(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::pair<double, double> parse_window(const std::string& text) {
    const size_t sep = text.find(':');
    if (sep == std::string::npos)
        throw wtrom::ValidationError("window must be lo:hi", "cct_window");
    const auto vals = parse_values(text.substr(0, sep) + "," + text.substr(sep + 1));
    return {vals[0], vals[1]};
}

std::string file_stem(const std::string& label) {
    std::string out;
    for (char c : label)
        out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
    return out.empty() ? "scenario" : out;
}

void print_notices(const h::Scenario& s) {
    for (const auto& n : s.notices) std::fprintf(stderr, "notice: %s\n", n.c_str());
}

void print_summary(const Trajectory& t) {
    std::printf("%-9s %zu samples, t = %.6g..%.6g s", t.model.c_str(), t.size(),
                t.t.empty() ? 0.0 : t.t.front(), t.t.empty() ? 0.0 : t.t.back());
    if (t.diverged) std::printf(", DIVERGED at t = %.6g s", t.t_diverged);
    std::printf("\n");
    for (const auto& ev : t.events)
        std::printf("  event %-14s t = %.6g s\n", ev.label.c_str(), ev.t_s);
}

void print_phasor(const char* name, Phasor v) {
    std::printf("  %-18s %.9g pu  angle %.9g rad\n", name, wtrom::mag(v),
                wtrom::ang(v));
}

int cmd_run(const std::string& path, const std::string& model_name,
            const std::string& out_dir, bool no_svg) {
    const h::Scenario s = h::load_scenario(path);
    print_notices(s);
    const h::Model model = h::parse_model(model_name);
    const h::RunResult res = h::run(s, model);
    const std::string stem = out_dir + "/" + file_stem(s.label);

    std::vector<const Trajectory*> series;
    if (model != h::Model::REFMODEL) series.push_back(&res.rom);
    if (model != h::Model::ROM) series.push_back(&res.refmodel);
    for (const Trajectory* t : series) {
        const std::string out = stem + "_" + t->model + ".csv";
        h::emit_trajectory_csv(*t, out);
        print_summary(*t);
        std::printf("  wrote %s\n", out.c_str());
    }
    if (res.report) {
        const auto& r = *res.report;
        std::printf("comparison window %.6g..%.6g s, %zu samples\n",
                    r.window_start_s, r.window_end_s, r.samples);
        std::printf("  rmse(delta)      = %.6g rad  (peak %.6g rad)\n",
                    r.rmse_delta_rad, r.peak_delta_error_rad);
        std::printf("  rmse(delta_dot)  = %.6g rad/s\n", r.rmse_delta_dot_radps);
        std::printf("  normalized rmse  = %.4g %% of reference swing\n",
                    100.0 * r.normalized_rmse);
        const std::string out = stem + "_report.csv";
        h::write_text_file(out, h::format_report_csv(r));
        std::printf("  wrote %s\n", out.c_str());
    }
    if (!no_svg) {
        const std::string out = stem + ".svg";
        h::emit_svg(series, out);
        std::printf("  wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& parameter,
              const std::string& values_text, const std::string& model_name,
              const std::string& cct_window, double cct_tol, bool serial,
              const std::string& out_file) {
    const h::Scenario s = h::load_scenario(path);
    print_notices(s);
    h::SweepOptions opt;
    opt.model = h::parse_model(model_name);
    opt.parallel = !serial;
    if (!cct_window.empty()) opt.cct_window = parse_window(cct_window);
    opt.cct_tol_s = cct_tol;
    const auto rows = h::sweep(s, parameter, parse_values(values_text), opt);
    const std::string csv = h::format_sweep_csv(rows, parameter);
    if (out_file.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        h::write_text_file(out_file, csv);
        std::printf("wrote %s (%zu rows)\n", out_file.c_str(), rows.size());
    }
    return 0;
}

int cmd_cct(const std::string& path, const std::string& window_text, double tol,
            const std::string& model_name) {
    const h::Scenario s = h::load_scenario(path);
    print_notices(s);
    const auto window = parse_window(window_text);
    const auto res = h::critical_clearing_time(s, window.first, window.second, tol,
                                               h::parse_model(model_name));
    std::printf("critical clearing time = %.9g s\n", res.t_clear);
    std::printf("  fault on at %.6g s, margin %.9g s\n", s.fault.t_on_s,
                res.t_clear - s.fault.t_on_s);
    std::printf("  %d bisection runs, %d bracket runs\n", res.bisection_runs,
                res.bracket_runs);
    return 0;
}

int cmd_faultcalc(const std::string& path) {
    const h::Scenario s = h::load_scenario(path);
    print_notices(s);
    const h::Timeline tl = h::build_timeline(s);
    const Phasor vg{s.vg_mag_pu, 0.0};

    std::printf("pre-fault operating point (id %.6g, iq %.6g, iq_neg %.6g pu)\n",
                tl.pre_refs.id_pos, tl.pre_refs.iq_pos, tl.pre_refs.iq_neg);
    print_phasor("terminal v+",
                 seqnet::prefault_voltage_pos(vg, tl.pre_refs, s.z.zg1));
    print_phasor("terminal v-", seqnet::prefault_voltage_neg(tl.pre_refs, s.z.zg2));

    std::printf("fault %s, zf = %.9g pu (id %.6g, iq %.6g, iq_neg %.6g pu)\n",
                wtrom::to_string(s.fault.kind).c_str(), s.fault.zf_pu,
                tl.fault_refs.id_pos, tl.fault_refs.iq_pos, tl.fault_refs.iq_neg);
    if (s.fault.kind == wtrom::FaultKind::BALANCED_3PH) {
        const Phasor scale = seqnet::balanced_retained_scale(s.z.zg1, s.fault.zf_pu);
        print_phasor("retained source", vg * scale);
        const auto sol = seqnet::solve_unfaulted(
            vg * scale, Phasor(tl.fault_refs.id_pos, tl.fault_refs.iq_pos),
            Phasor(0.0, tl.fault_refs.iq_neg), s.z);
        print_phasor("terminal v+", sol.v_pos);
        return 0;
    }
    const auto cmp =
        seqnet::compare_routes(s.fault.kind, vg, tl.fault_refs, s.z, s.fault.zf_pu);
    print_phasor("closed form v+", cmp.closed_form);
    print_phasor("network solve v+", cmp.solver);
    std::printf("  routes differ by %.3g relative%s\n", cmp.rel_diff,
                cmp.flagged ? "  [FLAGGED: outside closed-form regime]" : "");
    const auto sol = seqnet::solve_coupled_network(s.fault.kind, vg, tl.fault_refs,
                                                   s.z, s.fault.zf_pu);
    print_phasor("terminal v-", sol.v_neg);
    print_phasor("retained source",
                 seqnet::postfault_voltage_pos(s.fault.kind, vg, Phasor{0.0, 0.0},
                                               s.z, s.fault.zf_pu));
    return 0;
}

int cmd_notch_bode(double zeta, double center_hz, double dt_s, double fmin_hz,
                   double fmax_hz, int points, const std::string& out_file) {
    const double wn = 2.0 * wtrom::pi * center_hz;
    const auto biquad = wtrom::NotchBiquad::design(wn, zeta, dt_s);
    std::string csv = "f_hz,mag_db,phase_deg\n";
    char line[128];
    for (int i = 0; i < points; ++i) {
        const double f = fmin_hz * std::pow(fmax_hz / fmin_hz,
                                            static_cast<double>(i) /
                                                static_cast<double>(points - 1));
        const std::complex<double> g =
            biquad.frequency_response(2.0 * wtrom::pi * f);
        std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g\n", f,
                      20.0 * std::log10(std::abs(g)),
                      std::arg(g) * 180.0 / wtrom::pi);
        csv += line;
    }
    if (out_file.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        h::write_text_file(out_file, csv);
        std::printf("wrote %s\n", out_file.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchronization stability toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, model_name = "both", out_dir = ".";
    bool no_svg = false;
    auto* run = app.add_subcommand("run", "simulate a scenario and write csv/svg");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--model", model_name, "rom, refmodel or both");
    run->add_option("--out", out_dir, "output directory (default .)");
    run->add_flag("--no-svg", no_svg, "skip the plot");

    std::string parameter, values_text, cct_window, sweep_out;
    double cct_tol = 1e-3;
    bool serial = false;
    auto* sweep = app.add_subcommand("sweep", "rerun over a parameter list");
    sweep->add_option("scenario", scenario_path)->required();
    sweep->add_option("--param", parameter, "parameter path, see 'params'")
        ->required();
    sweep->add_option("--values", values_text, "a,b,c or lo:hi:count")->required();
    sweep->add_option("--model", model_name);
    sweep->add_option("--cct-window", cct_window,
                      "also bisect a clearing-time window lo:hi per value");
    sweep->add_option("--cct-tol", cct_tol, "bisection tolerance, s");
    sweep->add_flag("--serial", serial, "disable the parallel runner");
    sweep->add_option("--out", sweep_out, "write the table here instead of stdout");

    std::string window_text;
    double tol = 1e-3;
    auto* cct = app.add_subcommand("cct", "bisect the critical clearing time");
    cct->add_option("scenario", scenario_path)->required();
    cct->add_option("--window", window_text, "clearing-time bracket lo:hi, s")
        ->required();
    cct->add_option("--tol", tol, "bisection tolerance, s");
    cct->add_option("--model", model_name);

    auto* faultcalc =
        app.add_subcommand("faultcalc", "print the sequence-network solution");
    faultcalc->add_option("scenario", scenario_path)->required();

    double zeta = 0.02, center_hz = 100.0, dt_s = 50e-6, fmin_hz = 1.0,
           fmax_hz = 9000.0;
    int points = 400;
    std::string bode_out;
    auto* bode = app.add_subcommand("notch-bode", "discrete notch response table");
    bode->add_option("--zeta", zeta, "notch damping ratio");
    bode->add_option("--center-hz", center_hz, "notch center, Hz");
    bode->add_option("--dt", dt_s, "sample period, s");
    bode->add_option("--fmin", fmin_hz);
    bode->add_option("--fmax", fmax_hz);
    bode->add_option("--points", points)->check(CLI::Range(2, 1000000));
    bode->add_option("--out", bode_out, "write the table here instead of stdout");

    auto* params = app.add_subcommand("params", "list sweepable parameter paths");

    try {
        app.parse(argc, argv);
        if (*run) return cmd_run(scenario_path, model_name, out_dir, no_svg);
        if (*sweep)
            return cmd_sweep(scenario_path, parameter, values_text, model_name,
                             cct_window, cct_tol, serial, sweep_out);
        if (*cct) return cmd_cct(scenario_path, window_text, tol, model_name);
        if (*faultcalc) return cmd_faultcalc(scenario_path);
        if (*bode)
            return cmd_notch_bode(zeta, center_hz, dt_s, fmin_hz, fmax_hz, points,
                                  bode_out);
        if (*params) {
            for (const auto& p : h::parameter_paths()) std::printf("%s\n", p.c_str());
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const wtrom::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const wtrom::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const wtrom::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
