#include "wtrom/refmodel.hpp"

#include <algorithm>
#include <cmath>

namespace wtrom::refmodel {

namespace {

constexpr double kThird = 2.0 * pi / 3.0;

struct Loop {
    double theta_pll = 0.0;
    double theta_g = 0.0;
    double xi = 0.0;      // PI integrator, rad/s
    double id = 0.0, iq_pos = 0.0, iq_neg = 0.0;
    Phasor v_neg_prev{0.0, 0.0};
};

const RefSegment& segment_at(const std::vector<RefSegment>& segs, double t) {
    size_t i = 0;
    while (i + 1 < segs.size() && segs[i + 1].t_start_s <= t + 1e-12) ++i;
    return segs[i];
}

}  // namespace

std::array<double, 3> synthesize_abc(Phasor v_pos, Phasor v_neg, double theta_g) {
    const double mp = mag(v_pos), ap = ang(v_pos);
    const double mn = mag(v_neg), an = ang(v_neg);
    return {mp * std::cos(theta_g + ap) + mn * std::cos(-theta_g + an),
            mp * std::cos(theta_g + ap - kThird) + mn * std::cos(-theta_g + an - kThird),
            mp * std::cos(theta_g + ap + kThird) + mn * std::cos(-theta_g + an + kThird)};
}

std::array<double, 2> park_dq(const std::array<double, 3>& abc, double theta) {
    const double alpha = (2.0 * abc[0] - abc[1] - abc[2]) / 3.0;
    const double beta = (abc[1] - abc[2]) / std::sqrt(3.0);
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * alpha + s * beta, -s * alpha + c * beta};
}

Trajectory simulate(const RefModelInputs& in, double t_end_s,
                    const RefModelParams& p, const rom::SolverConfig& cfg) {
    if (!(cfg.dt_s > 0.0) || !(t_end_s > 0.0))
        throw ValidationError("step size and horizon must be positive", "solver_config");
    if (cfg.out_dt_s < cfg.dt_s)
        throw ValidationError("output decimation must not be finer than the step",
                              "solver_config");
    if (in.segments.empty() || in.segments.front().t_start_s != 0.0)
        throw ValidationError("segment list must start at t = 0", "segments");
    for (size_t i = 1; i < in.segments.size(); ++i) {
        if (in.segments[i].t_start_s <= in.segments[i - 1].t_start_s)
            throw ValidationError("segments must be strictly ordered", "segments");
    }
    if (!(p.cc_tau_s >= 0.0))
        throw ValidationError("current lag time constant must be non-negative",
                              "cc_tau");

    const double dt = cfg.dt_s;
    const double w0 = p.rom.omega0_radps;
    const double alpha = p.cc_tau_s > 0.0 ? 1.0 - std::exp(-dt / p.cc_tau_s) : 1.0;

    NotchBiquad notch{};
    if (p.notch.enabled)
        notch = NotchBiquad::design(p.notch.omega_n_radps, p.notch.zeta, dt);

    Loop s;
    s.id = in.id_ref.value(0.0);
    s.iq_pos = in.iq_pos_ref.value(0.0);
    s.iq_neg = in.iq_neg_ref.value(0.0);

    // clean steady start: lock the loop at the swing-model equilibrium so
    // both models leave the same operating point
    const auto& seg0 = in.segments.front();
    const double vg0 = in.vg_mag * mag(seg0.source_scale);
    s.theta_pll = rom::equilibrium_delta(s.id, s.iq_pos, vg0, 1.0, p.rom);
    s.theta_g = 0.0;
    s.xi = in.omega_g.value(0.0) - w0;

    Trajectory out;
    out.model = "refmodel";
    for (size_t i = 1; i < in.segments.size(); ++i)
        out.events.push_back({in.segments[i].t_start_s, in.segments[i].label});

    const long n_steps = static_cast<long>(std::ceil(t_end_s / dt - 1e-9));
    double next_out = 0.0;

    for (long k = 0; k <= n_steps; ++k) {
        const double t = std::min(static_cast<double>(k) * dt, t_end_s);
        const auto& seg = segment_at(in.segments, t);
        const double wg = in.omega_g.value(t);
        const double delta = s.theta_pll - s.theta_g;

        // converter injections in the source phasor frame
        const Phasor rot = std::polar(1.0, delta);
        const Phasor i_pos = Phasor(s.id, s.iq_pos) * rot;
        Phasor dir = std::conj(rot);
        if (mag(s.v_neg_prev) > p.v_neg_track_min_pu)
            dir = s.v_neg_prev / mag(s.v_neg_prev);
        const Phasor i_neg = Phasor(0.0, 1.0) * s.iq_neg * dir;

        const Phasor source = in.vg_mag * seg.source_scale;
        seqnet::NetworkSolution sol =
            seg.faulted
                ? seqnet::solve_coupled_network(seg.kind, source, i_pos, i_neg,
                                                in.z, seg.zf_pu)
                : seqnet::solve_unfaulted(source, i_pos, i_neg, in.z);
        const Phasor v_pos_m = sol.v_pos + i_pos * in.zc.z(1.0);
        const Phasor v_neg_m = sol.v_neg + i_neg * in.zc.z(1.0);

        const auto abc = synthesize_abc(v_pos_m, v_neg_m, s.theta_g);
        const double vq_raw = park_dq(abc, s.theta_pll)[1];
        const double vq = p.notch.enabled ? notch.process(vq_raw) : vq_raw;
        const double domega = p.rom.kp * vq + s.xi;
        const double delta_dot = domega - (wg - w0);

        const bool lost = std::abs(delta_dot) > cfg.divergence_limit_radps ||
                          !std::isfinite(delta) || !std::isfinite(delta_dot);
        if (lost || t >= next_out - 1e-9 || k == n_steps) {
            out.t.push_back(t);
            out.delta.push_back(delta);
            out.delta_dot.push_back(delta_dot);
            out.vf_pos_mag.push_back(mag(v_pos_m));
            out.vf_pos_ang.push_back(ang(v_pos_m));
            out.vf_neg_mag.push_back(mag(v_neg_m));
            out.omega_g.push_back(wg);
            while (next_out <= t + 1e-9) next_out += cfg.out_dt_s;
        }
        if (lost) {
            out.diverged = true;
            out.t_diverged = t;
            break;
        }

        // advance loop states; the last sample only reports
        if (k == n_steps) break;
        const double h = std::min(dt, t_end_s - t);
        s.xi += p.rom.ki * vq * h;
        s.theta_pll += (w0 + domega) * h;
        s.theta_g += wg * h;
        s.id += alpha * (in.id_ref.value(t) - s.id);
        s.iq_pos += alpha * (in.iq_pos_ref.value(t) - s.iq_pos);
        s.iq_neg += alpha * (in.iq_neg_ref.value(t) - s.iq_neg);
        s.v_neg_prev = v_neg_m;
    }
    return out;
}

}  // namespace wtrom::refmodel
