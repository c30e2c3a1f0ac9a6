#include "wtrom/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "wtrom/gridcode.hpp"
#include "wtrom/seqnet.hpp"

namespace wtrom::harness {

namespace {

constexpr const char* kCsvHeader =
    "t_s,delta_rad,delta_dot_radps,vf_pos_mag_pu,vf_pos_ang_rad,vf_neg_mag_pu,"
    "omega_g_radps";

void step_to(PiecewiseLinearSignal& sig, double t, double value) {
    sig.add(t, sig.v.back());
    sig.add(t, value);
}

// Self-consistent grid-code operating point on an unfaulted (possibly
// source-scaled) network; the coupled-fault counterpart lives in gridcode.
CurrentRefs settle_unfaulted_refs(Phasor source, const SequenceImpedanceSet& z,
                                  const gridcode::GridCodeParams& gc,
                                  double id_request) {
    CurrentRefs refs{std::max(0.0, id_request), 0.0, 0.0};
    for (int it = 1; it <= 100; ++it) {
        auto sol = seqnet::solve_unfaulted(source, Phasor(refs.id_pos, refs.iq_pos),
                                           Phasor(0.0, refs.iq_neg), z);
        CurrentRefs next =
            gridcode::lvrt_references(mag(sol.v_pos), mag(sol.v_neg), gc, id_request);
        const double residual = std::max({std::abs(next.id_pos - refs.id_pos),
                                          std::abs(next.iq_pos - refs.iq_pos),
                                          std::abs(next.iq_neg - refs.iq_neg)});
        refs = next;
        if (residual < 1e-10) return refs;
    }
    throw NoConvergence("grid-code operating point did not settle", 100);
}

size_t segment_ending_at(const std::vector<refmodel::RefSegment>& segs, double t) {
    size_t k = 0;
    while (k + 1 < segs.size() && segs[k + 1].t_start_s < t - 1e-12) ++k;
    return k;
}

size_t segment_starting_at(const std::vector<refmodel::RefSegment>& segs, double t) {
    size_t k = 0;
    while (k + 1 < segs.size() && segs[k + 1].t_start_s <= t + 1e-12) ++k;
    return k;
}

// The swing model integrates a frame-relative angle and sees only a source
// magnitude; this lifts its samples into the source frame and replaces the
// voltage columns with the sequence solve at the scheduled currents.
void finalize_swing_trajectory(Trajectory& t, const Timeline& tl, const Scenario& s) {
    const Phasor vg{s.vg_mag_pu, 0.0};
    const auto& segs = tl.ref_inputs.segments;
    const Phasor zc = s.zc.z(1.0);

    for (size_t i = 0; i < t.size(); ++i) {
        const double ti = t.t[i];
        // A sample on an event instant was integrated in the ending
        // segment's frame. The reported angle is continuous across events,
        // so the right-sided reading would give the same value.
        t.delta[i] += tl.ref_angle_rad[segment_ending_at(segs, ti)];

        // voltage columns switch with the network at the event instant,
        // matching the reference model's sampling
        const auto& seg = segs[segment_starting_at(segs, ti)];
        const Phasor i_pos{tl.ref_inputs.id_ref.value(ti),
                           tl.ref_inputs.iq_pos_ref.value(ti)};
        const Phasor i_neg = Phasor(0.0, 1.0) * tl.ref_inputs.iq_neg_ref.value(ti);
        const Phasor source = vg * seg.source_scale;
        auto sol = seg.faulted
                       ? seqnet::solve_coupled_network(seg.kind, source, i_pos, i_neg,
                                                       s.z, seg.zf_pu)
                       : seqnet::solve_unfaulted(source, i_pos, i_neg, s.z);
        const Phasor v_pos_m = sol.v_pos + i_pos * zc;
        const Phasor v_neg_m = sol.v_neg + i_neg * zc;
        t.vf_pos_mag[i] = mag(v_pos_m);
        t.vf_pos_ang[i] = ang(v_pos_m);
        t.vf_neg_mag[i] = mag(v_neg_m);
    }
}

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void appendf(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    out += buf;
}

double parse_csv_number(const std::string& tok, int line) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError("bad numeric field '" + tok + "'", line);
    return v;
}

}  // namespace

Model parse_model(const std::string& name) {
    if (name == "rom") return Model::ROM;
    if (name == "refmodel") return Model::REFMODEL;
    if (name == "both") return Model::BOTH;
    throw ValidationError("model must be rom, refmodel or both, got '" + name + "'",
                          "model_name");
}

Timeline build_timeline(const Scenario& s) {
    Timeline tl;
    const Phasor vg{s.vg_mag_pu, 0.0};
    const double t_on = s.fault.t_on_s;
    const double t_clear = s.fault.t_clear_s;
    const bool has_clear = s.fault.cleared && t_clear < s.t_end_s;
    const PiecewiseLinearSignal omega =
        s.omega_g.t.empty()
            ? PiecewiseLinearSignal::constant(s.params.rom.omega0_radps)
            : s.omega_g;

    if (s.mode == CurrentMode::EXPLICIT) {
        tl.pre_refs = {s.currents.pre_id_pu, s.currents.pre_iq_pu,
                       s.currents.pre_iqneg_pu};
        tl.fault_refs = {s.currents.fault_id_pu, s.currents.fault_iq_pu,
                         s.currents.fault_iqneg_pu};
    } else {
        tl.pre_refs = settle_unfaulted_refs(vg, s.z, s.gc, s.gc_id_request_pu);
        if (s.fault.kind == FaultKind::BALANCED_3PH) {
            const Phasor scale =
                seqnet::balanced_retained_scale(s.z.zg1, s.fault.zf_pu);
            tl.fault_refs =
                settle_unfaulted_refs(vg * scale, s.z, s.gc, s.gc_id_request_pu);
        } else {
            tl.fault_refs = gridcode::fixed_point_references(
                                s.fault.kind, vg, s.z, s.fault.zf_pu, s.gc,
                                s.gc_id_request_pu)
                                .refs;
        }
    }

    // fault-interval topology and the reference phasor the swing model
    // integrates against during it
    refmodel::RefSegment fault_seg;
    fault_seg.t_start_s = t_on;
    fault_seg.label = "fault_on";
    Phasor v_fault_src;
    if (s.fault.kind == FaultKind::BALANCED_3PH) {
        fault_seg.source_scale = seqnet::balanced_retained_scale(s.z.zg1, s.fault.zf_pu);
        v_fault_src = vg * fault_seg.source_scale;
    } else {
        fault_seg.faulted = true;
        fault_seg.kind = s.fault.kind;
        fault_seg.zf_pu = s.fault.zf_pu;
        // retained source seen by the swing model: the coupled solve with
        // the positive-sequence branch left open. The model carries its own
        // branch drop; the negative-sequence injection stays in because it
        // reaches v+ only through the fault coupling, which the model has
        // no internal picture of.
        v_fault_src = seqnet::solve_coupled_network(
                          s.fault.kind, vg,
                          CurrentRefs{0.0, 0.0, tl.fault_refs.iq_neg}, s.z,
                          s.fault.zf_pu)
                          .v_pos;
    }
    const double fault_angle = mag(v_fault_src) < 1e-9 ? 0.0 : ang(v_fault_src);

    // shared current schedules: reactive commands step at the fault edges,
    // the active command recovers on the configured ramp
    PiecewiseLinearSignal id, iqp, iqn;
    const CurrentRefs& first = t_on > 0.0 ? tl.pre_refs : tl.fault_refs;
    id.add(0.0, first.id_pos);
    iqp.add(0.0, first.iq_pos);
    iqn.add(0.0, first.iq_neg);
    if (t_on > 0.0) {
        step_to(id, t_on, tl.fault_refs.id_pos);
        step_to(iqp, t_on, tl.fault_refs.iq_pos);
        step_to(iqn, t_on, tl.fault_refs.iq_neg);
    }
    if (has_clear) {
        step_to(iqp, t_clear, tl.pre_refs.iq_pos);
        step_to(iqn, t_clear, tl.pre_refs.iq_neg);
        const double gap = tl.pre_refs.id_pos - tl.fault_refs.id_pos;
        const double rate = s.mode == CurrentMode::GRIDCODE
                                ? s.gc.id_post_ramp_pups
                                : s.currents.recovery_ramp_pups;
        if (!std::isfinite(rate) || gap == 0.0) {
            step_to(id, t_clear, tl.pre_refs.id_pos);
        } else {
            id.add(t_clear, tl.fault_refs.id_pos);
            id.add(t_clear + std::abs(gap) / rate, tl.pre_refs.id_pos);
        }
    }

    PiecewiseLinearSignal vg_sig;
    vg_sig.add(0.0, t_on > 0.0 ? s.vg_mag_pu : mag(v_fault_src));
    if (t_on > 0.0) {
        step_to(vg_sig, t_on, mag(v_fault_src));
        tl.rom_events.push_back({t_on, vg, v_fault_src, "fault_on"});
    }
    if (has_clear) {
        step_to(vg_sig, t_clear, s.vg_mag_pu);
        tl.rom_events.push_back({t_clear, v_fault_src, vg, "fault_cleared"});
    }

    tl.rom_signals.id = id;
    tl.rom_signals.iq = iqp;
    tl.rom_signals.vg_mag = vg_sig;
    tl.rom_signals.omega_g = omega;

    // both models leave the pre-fault operating point; with the fault
    // already on at t = 0, the swing model sees it through the rotated frame
    const double w_pu0 = omega.value(0.0) / s.params.rom.omega0_radps;
    double delta0 = rom::equilibrium_delta(tl.pre_refs.id_pos, tl.pre_refs.iq_pos,
                                           s.vg_mag_pu, w_pu0, s.params.rom);
    if (t_on <= 0.0) delta0 -= fault_angle;
    tl.rom_init = {delta0, 0.0};

    std::vector<refmodel::RefSegment> segs;
    if (t_on > 0.0) {
        segs.push_back({});
        tl.ref_angle_rad.push_back(0.0);
        segs.push_back(fault_seg);
        tl.ref_angle_rad.push_back(fault_angle);
    } else {
        fault_seg.t_start_s = 0.0;
        segs.push_back(fault_seg);
        tl.ref_angle_rad.push_back(fault_angle);
    }
    if (has_clear) {
        refmodel::RefSegment post;
        post.t_start_s = t_clear;
        post.label = "fault_cleared";
        segs.push_back(post);
        tl.ref_angle_rad.push_back(0.0);
    }

    tl.ref_inputs.vg_mag = s.vg_mag_pu;
    tl.ref_inputs.z = s.z;
    tl.ref_inputs.zc = s.zc;
    tl.ref_inputs.id_ref = id;
    tl.ref_inputs.iq_pos_ref = iqp;
    tl.ref_inputs.iq_neg_ref = iqn;
    tl.ref_inputs.omega_g = omega;
    tl.ref_inputs.segments = std::move(segs);
    return tl;
}

RunResult run(const Scenario& s, Model model) {
    Timeline tl = build_timeline(s);

    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(s.content_hash));

    RunResult out;
    if (model != Model::REFMODEL) {
        out.rom = rom::integrate(tl.rom_init, s.t_end_s, tl.rom_signals,
                                 tl.rom_events, s.params.rom, s.solver);
        finalize_swing_trajectory(out.rom, tl, s);
        out.rom.scenario_hash = hex;
    }
    if (model != Model::ROM) {
        out.refmodel = refmodel::simulate(tl.ref_inputs, s.t_end_s, s.params, s.solver);
        out.refmodel.scenario_hash = hex;
    }
    if (model == Model::BOTH)
        out.report = compare_trajectories(out.rom, out.refmodel, s.fault.t_on_s);
    return out;
}

ComparisonReport compare_trajectories(const Trajectory& swing,
                                      const Trajectory& reference,
                                      double window_start_s,
                                      double event_exclusion_s) {
    ComparisonReport r;
    if (swing.t.empty() || reference.t.size() < 2) return r;
    const double lo = std::max({window_start_s, swing.t.front(), reference.t.front()});
    const double hi = std::min(swing.t.back(), reference.t.back());
    r.window_start_s = lo;
    r.window_end_s = hi;

    auto excluded = [&](double t) {
        for (const auto* evs : {&swing.events, &reference.events}) {
            for (const auto& ev : *evs) {
                if (t >= ev.t_s - 1e-9 && t <= ev.t_s + event_exclusion_s + 1e-9)
                    return true;
            }
        }
        return false;
    };

    double se_d = 0.0, se_dd = 0.0, peak = 0.0;
    double ref_lo = std::numeric_limits<double>::infinity();
    double ref_hi = -std::numeric_limits<double>::infinity();
    size_t n = 0, j = 1;
    for (size_t i = 0; i < swing.t.size(); ++i) {
        const double t = swing.t[i];
        if (t < lo - 1e-12 || t > hi + 1e-12 || excluded(t)) continue;
        while (j + 1 < reference.t.size() && reference.t[j] < t) ++j;
        const double t0 = reference.t[j - 1], t1 = reference.t[j];
        const double w = t1 > t0 ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
        const double rd =
            reference.delta[j - 1] + w * (reference.delta[j] - reference.delta[j - 1]);
        const double rdd = reference.delta_dot[j - 1] +
                           w * (reference.delta_dot[j] - reference.delta_dot[j - 1]);
        const double ed = swing.delta[i] - rd;
        const double edd = swing.delta_dot[i] - rdd;
        se_d += ed * ed;
        se_dd += edd * edd;
        peak = std::max(peak, std::abs(ed));
        ref_lo = std::min(ref_lo, rdd);
        ref_hi = std::max(ref_hi, rdd);
        ++n;
    }
    if (n == 0) return r;
    r.samples = n;
    r.rmse_delta_rad = std::sqrt(se_d / static_cast<double>(n));
    r.rmse_delta_dot_radps = std::sqrt(se_dd / static_cast<double>(n));
    r.peak_delta_error_rad = peak;
    const double ptp = ref_hi - ref_lo;
    r.normalized_rmse = ptp > 0.0 ? r.rmse_delta_dot_radps / ptp : 0.0;
    return r;
}

bool classify_stable(const Trajectory& t, double window_s, double threshold_radps) {
    if (t.diverged || t.t.empty()) return false;
    const double from = t.t.back() - window_s;
    for (size_t i = t.t.size(); i-- > 0;) {
        if (t.t[i] < from) break;
        if (std::abs(t.delta_dot[i]) >= threshold_radps) return false;
    }
    return true;
}

rom::BisectionResult critical_clearing_time(const Scenario& s, double window_lo_s,
                                            double window_hi_s, double tol_s,
                                            Model model) {
    const Model m = model == Model::BOTH ? Model::ROM : model;
    auto stable_when_cleared_at = [&s, m](double tc) {
        Scenario sc = s;
        sc.fault.cleared = true;
        sc.fault.t_clear_s = tc;
        validate_scenario(sc);
        RunResult res = run(sc, m);
        return classify_stable(m == Model::ROM ? res.rom : res.refmodel);
    };
    return rom::bisect_clearing_time(stable_when_cleared_at, window_lo_s, window_hi_s,
                                     tol_s);
}

std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter,
                            const std::vector<double>& values,
                            const SweepOptions& opt) {
    const auto paths = parameter_paths();
    if (std::find(paths.begin(), paths.end(), parameter) == paths.end())
        throw UnknownParameter("no sweepable parameter named '" + parameter + "'");

    std::vector<SweepRow> rows(values.size());
    std::exception_ptr failure;

    const long count = static_cast<long>(values.size());
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (long i = 0; i < count; ++i) {
        try {
            Scenario sc = base;
            apply_parameter(sc, parameter, values[i]);
            RunResult res = run(sc, opt.model);

            SweepRow row;
            row.value = values[i];
            switch (opt.model) {
                case Model::ROM: row.stable = classify_stable(res.rom); break;
                case Model::REFMODEL: row.stable = classify_stable(res.refmodel); break;
                case Model::BOTH:
                    row.stable =
                        classify_stable(res.rom) && classify_stable(res.refmodel);
                    break;
            }
            if (opt.cct_window) {
                try {
                    row.cct_s = critical_clearing_time(sc, opt.cct_window->first,
                                                       opt.cct_window->second,
                                                       opt.cct_tol_s, opt.model)
                                    .t_clear;
                } catch (const BracketInvalid&) {
                    // boundary outside the window: row stays without a CCT
                }
            }
            rows[static_cast<size_t>(i)] = row;
        } catch (...) {
#pragma omp critical(sweep_failure)
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, Model model,
                                 bool parallel) {
    std::vector<RunResult> out(scenarios.size());
    std::exception_ptr failure;

    const long count = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long i = 0; i < count; ++i) {
        try {
            out[static_cast<size_t>(i)] = run(scenarios[static_cast<size_t>(i)], model);
        } catch (...) {
#pragma omp critical(batch_failure)
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string format_trajectory_csv(const Trajectory& t) {
    std::string out = "# scenario ";
    out += t.scenario_hash.empty() ? "0000000000000000" : t.scenario_hash;
    out += " model ";
    out += t.model.empty() ? "unknown" : t.model;
    out += '\n';
    if (t.diverged) {
        out += "# diverged ";
        append_g17(out, t.t_diverged);
        out += '\n';
    }
    for (const auto& ev : t.events) {
        out += "# event ";
        append_g17(out, ev.t_s);
        out += ' ';
        out += ev.label;
        out += '\n';
    }
    out += kCsvHeader;
    out += '\n';
    for (size_t i = 0; i < t.size(); ++i) {
        append_g17(out, t.t[i]);
        out += ',';
        append_g17(out, t.delta[i]);
        out += ',';
        append_g17(out, t.delta_dot[i]);
        out += ',';
        append_g17(out, t.vf_pos_mag[i]);
        out += ',';
        append_g17(out, t.vf_pos_ang[i]);
        out += ',';
        append_g17(out, t.vf_neg_mag[i]);
        out += ',';
        append_g17(out, t.omega_g[i]);
        out += '\n';
    }
    return out;
}

Trajectory parse_trajectory_csv(const std::string& text) {
    Trajectory t;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line);
            std::string hash_mark, tag;
            ls >> hash_mark >> tag;
            if (tag == "scenario") {
                std::string model_word;
                ls >> t.scenario_hash >> model_word >> t.model;
            } else if (tag == "event") {
                std::string ts, label;
                ls >> ts >> label;
                t.events.push_back({parse_csv_number(ts, line_no), label});
            } else if (tag == "diverged") {
                std::string ts;
                ls >> ts;
                t.diverged = true;
                t.t_diverged = parse_csv_number(ts, line_no);
            }
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader)
                throw ParseError("unexpected header '" + line + "'", line_no);
            header_seen = true;
            continue;
        }
        std::array<double, 7> row{};
        size_t field = 0, pos = 0;
        while (field < 7) {
            const size_t comma = line.find(',', pos);
            const std::string tok = line.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            row[field++] = parse_csv_number(tok, line_no);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (field != 7)
            throw ParseError("expected 7 comma-separated fields", line_no);
        t.t.push_back(row[0]);
        t.delta.push_back(row[1]);
        t.delta_dot.push_back(row[2]);
        t.vf_pos_mag.push_back(row[3]);
        t.vf_pos_ang.push_back(row[4]);
        t.vf_neg_mag.push_back(row[5]);
        t.omega_g.push_back(row[6]);
    }
    if (!header_seen) throw ParseError("missing column header", line_no);
    for (size_t i = 1; i < t.t.size(); ++i) {
        if (!(t.t[i] > t.t[i - 1]))
            throw ValidationError("sample times must increase strictly",
                                  "monotonic_time");
    }
    return t;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trajectory file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trajectory_csv(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

void emit_trajectory_csv(const Trajectory& t, const std::string& path) {
    write_text_file(path, format_trajectory_csv(t));
}

std::string format_report_csv(const ComparisonReport& r) {
    std::string out =
        "rmse_delta_rad,rmse_delta_dot_radps,peak_delta_error_rad,normalized_rmse,"
        "window_start_s,window_end_s,samples\n";
    append_g17(out, r.rmse_delta_rad);
    out += ',';
    append_g17(out, r.rmse_delta_dot_radps);
    out += ',';
    append_g17(out, r.peak_delta_error_rad);
    out += ',';
    append_g17(out, r.normalized_rmse);
    out += ',';
    append_g17(out, r.window_start_s);
    out += ',';
    append_g17(out, r.window_end_s);
    out += ',';
    appendf(out, "%zu\n", r.samples);
    return out;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows,
                             const std::string& parameter) {
    std::string out = parameter + ",stable,cct_s\n";
    for (const auto& row : rows) {
        append_g17(out, row.value);
        out += row.stable ? ",1," : ",0,";
        if (row.cct_s) append_g17(out, *row.cct_s);
        out += '\n';
    }
    return out;
}

namespace {

struct AxisSpan {
    double lo = 0.0, hi = 1.0;

    double unit(double v) const { return (v - lo) / (hi - lo); }
};

AxisSpan span_of(const std::vector<const std::vector<double>*>& columns) {
    AxisSpan s{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
    for (const auto* col : columns) {
        for (double v : *col) {
            s.lo = std::min(s.lo, v);
            s.hi = std::max(s.hi, v);
        }
    }
    if (!(s.hi > s.lo)) {
        s.lo -= 1.0;
        s.hi += 1.0;
    }
    const double pad = 0.05 * (s.hi - s.lo);
    s.lo -= pad;
    s.hi += pad;
    return s;
}

}  // namespace

std::string render_svg(const std::vector<const Trajectory*>& series) {
    if (series.empty() || series.size() > 2)
        throw ValidationError("renders one or two trajectories", "svg_series");
    for (const auto* tr : series) {
        if (tr == nullptr || tr->t.empty())
            throw ValidationError("every rendered trajectory needs samples",
                                  "svg_series");
    }

    constexpr double kLeft = 70.0, kWidth = 860.0;
    constexpr double kPanelH = 250.0;
    constexpr double kTop[2] = {50.0, 350.0};
    const char* kColor[2] = {"#1f77b4", "#ff7f0e"};
    const char* kYLabel[2] = {"delta_rad", "delta_dot_radps"};

    std::vector<const std::vector<double>*> times, deltas, rates;
    for (const auto* tr : series) {
        times.push_back(&tr->t);
        deltas.push_back(&tr->delta);
        rates.push_back(&tr->delta_dot);
    }
    const AxisSpan xs = span_of(times);
    const AxisSpan ys[2] = {span_of(deltas), span_of(rates)};

    auto map_x = [&](double t) { return kLeft + xs.unit(t) * kWidth; };
    auto map_y = [&](double v, int panel) {
        return kTop[panel] + kPanelH - ys[panel].unit(v) * kPanelH;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"640\" "
           "viewBox=\"0 0 960 640\" font-family=\"monospace\" font-size=\"12\">\n";
    svg += "<rect width=\"960\" height=\"640\" fill=\"white\"/>\n";

    for (size_t k = 0; k < series.size(); ++k) {
        appendf(svg,
                "<line x1=\"%g\" y1=\"20\" x2=\"%g\" y2=\"20\" stroke=\"%s\" "
                "stroke-width=\"2\"/><text x=\"%g\" y=\"24\">%s</text>\n",
                kLeft + 220.0 * static_cast<double>(k),
                kLeft + 220.0 * static_cast<double>(k) + 30.0, kColor[k],
                kLeft + 220.0 * static_cast<double>(k) + 36.0,
                series[k]->model.empty() ? "trajectory" : series[k]->model.c_str());
        if (series[k]->diverged)
            appendf(svg, "<text x=\"%g\" y=\"38\" fill=\"%s\">diverged at %.6g s</text>\n",
                    kLeft + 220.0 * static_cast<double>(k), kColor[k],
                    series[k]->t_diverged);
    }

    for (int panel = 0; panel < 2; ++panel) {
        appendf(svg,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                kLeft, kTop[panel], kWidth, kPanelH);
        appendf(svg,
                "<text x=\"14\" y=\"%g\" transform=\"rotate(-90 14 %g)\" "
                "text-anchor=\"middle\">%s</text>\n",
                kTop[panel] + kPanelH / 2.0, kTop[panel] + kPanelH / 2.0,
                kYLabel[panel]);
        for (int tick = 0; tick <= 3; ++tick) {
            const double v =
                ys[panel].lo + (ys[panel].hi - ys[panel].lo) * tick / 3.0;
            const double y = map_y(v, panel);
            appendf(svg,
                    "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/>"
                    "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.4g</text>\n",
                    kLeft, y, kLeft + kWidth, y, kLeft - 6.0, y + 4.0, v);
        }
    }
    for (int tick = 0; tick <= 5; ++tick) {
        const double t = xs.lo + (xs.hi - xs.lo) * tick / 5.0;
        appendf(svg, "<text x=\"%g\" y=\"622\" text-anchor=\"middle\">%.4g</text>\n",
                map_x(t), t);
    }
    svg += "<text x=\"500\" y=\"638\" text-anchor=\"middle\">t_s</text>\n";

    for (const auto& ev : series.front()->events) {
        const double x = map_x(ev.t_s);
        appendf(svg,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\" "
                "stroke-dasharray=\"4 3\"/>\n",
                x, kTop[0], x, kTop[1] + kPanelH);
        appendf(svg, "<text x=\"%g\" y=\"%g\" fill=\"#555\">%s</text>\n", x + 3.0,
                kTop[0] + 14.0, ev.label.c_str());
    }

    for (int panel = 0; panel < 2; ++panel) {
        for (size_t k = 0; k < series.size(); ++k) {
            const auto& tr = *series[k];
            const auto& col = panel == 0 ? tr.delta : tr.delta_dot;
            const size_t stride = std::max<size_t>(1, tr.t.size() / 1600);
            appendf(svg, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.2\" "
                         "points=\"",
                    kColor[k]);
            for (size_t i = 0; i < tr.t.size(); i += stride)
                appendf(svg, "%.2f,%.2f ", map_x(tr.t[i]), map_y(col[i], panel));
            if ((tr.t.size() - 1) % stride != 0)
                appendf(svg, "%.2f,%.2f ", map_x(tr.t.back()),
                        map_y(col.back(), panel));
            svg += "\"/>\n";
        }
    }

    svg += "</svg>\n";
    return svg;
}

void emit_svg(const std::vector<const Trajectory*>& series, const std::string& path) {
    write_text_file(path, render_svg(series));
}

}  // namespace wtrom::harness
