#include "wtrom/rom.hpp"

#include <algorithm>
#include <cmath>

namespace wtrom::rom {

namespace {

constexpr double kTimeMergeTol = 1e-12;

struct FrozenInputs {
    AffineView id, iq, vg, wg;

    RomInputsAtT at(double t) const {
        RomInputsAtT in;
        in.id = id.value(t);
        in.id_dot = id.slope();
        in.iq = iq.value(t);
        in.iq_dot = iq.slope();
        in.lg_iq_ddot = 0.0;  // schedules are piecewise linear
        in.vg_mag = vg.value(t);
        in.vg_mag_dot = vg.slope();
        in.omega_g = wg.value(t);
        in.omega_g_dot = wg.slope();
        return in;
    }
};

}  // namespace

SwingCoefficients coefficients(const RomState& s, const RomInputsAtT& in,
                               const RomParams& p) {
    SwingCoefficients c{};
    c.m = 1.0 - p.kp * p.lg * in.id;
    if (std::abs(c.m) < 1e-9)
        throw SingularInertia("equivalent inertia magnitude below 1e-9");

    // Torque products take the grid frequency per unit; the ramp
    // feedthrough m * d(omega_g)/dt stays in rad/s^2.
    const double w_pu = in.omega_g / p.omega0_radps;
    c.t_m = p.kp * (p.r_lg * in.iq_dot + in.lg_iq_ddot + p.lg * in.id_dot * w_pu) +
            p.ki * (p.r_lg * in.iq + p.lg * in.iq_dot + p.lg * in.id * w_pu);
    c.t_e = p.ki * in.vg_mag * std::sin(s.delta) +
            p.kp * in.vg_mag_dot * std::sin(s.delta) + c.m * in.omega_g_dot;
    c.d = p.kp * (in.vg_mag * std::cos(s.delta) - p.lg * in.id_dot) -
          p.ki * p.lg * in.id;
    return c;
}

std::array<double, 2> rhs(const RomState& s, const RomInputsAtT& in,
                          const RomParams& p) {
    auto c = coefficients(s, in, p);
    return {s.delta_dot, (c.t_m - c.t_e - c.d * s.delta_dot) / c.m};
}

double equilibrium_delta(double id, double iq, double vg_mag, double omega_g_pu,
                         const RomParams& p) {
    if (vg_mag <= 0.0)
        throw ValidationError("equilibrium requires a positive source magnitude",
                              "equilibrium_source");
    const double s = (p.r_lg * iq + p.lg * id * omega_g_pu) / vg_mag;
    if (std::abs(s) > 1.0)
        throw ValidationError("impedance drop exceeds source magnitude, no "
                              "equilibrium angle exists",
                              "equilibrium_exists");
    return std::asin(s);
}

double phase_jump(Phasor v_before, Phasor v_after) {
    if (mag(v_before) < 1e-9 || mag(v_after) < 1e-9) return 0.0;
    return ang(v_before * std::conj(v_after));
}

RomState apply_fault_event(const RomState& s, Phasor v_before, Phasor v_after) {
    return {s.delta + phase_jump(v_before, v_after), s.delta_dot};
}

Trajectory integrate(RomState init, double t_end_s, const RomSignals& signals,
                     const std::vector<RomEvent>& events, const RomParams& p,
                     const SolverConfig& cfg) {
    if (!(cfg.dt_s > 0.0) || !(t_end_s > 0.0))
        throw ValidationError("step size and horizon must be positive", "solver_config");
    if (cfg.out_dt_s < cfg.dt_s)
        throw ValidationError("output decimation must not be finer than the step",
                              "solver_config");
    for (const auto& ev : events) {
        if (ev.t_s < 0.0 || ev.t_s > t_end_s)
            throw ValidationError("event outside the simulation horizon", "event_time");
    }

    // Segment boundaries: events plus every schedule breakpoint, so each
    // segment integrates a smooth right-hand side.
    std::vector<double> bounds{0.0, t_end_s};
    for (const auto& ev : events) bounds.push_back(ev.t_s);
    for (const auto* sig : {&signals.id, &signals.iq, &signals.vg_mag, &signals.omega_g}) {
        for (double bp : sig->t) {
            if (bp > 0.0 && bp < t_end_s) bounds.push_back(bp);
        }
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end(),
                             [](double a, double b) { return b - a < kTimeMergeTol; }),
                 bounds.end());

    Trajectory out;
    out.model = "rom";
    for (const auto& ev : events) out.events.push_back({ev.t_s, ev.label});

    RomState state = init;
    auto record = [&](double t) {
        out.t.push_back(t);
        out.delta.push_back(state.delta);
        out.delta_dot.push_back(state.delta_dot);
        out.vf_pos_mag.push_back(signals.vg_mag.value(t));
        out.vf_pos_ang.push_back(0.0);
        out.vf_neg_mag.push_back(0.0);
        out.omega_g.push_back(signals.omega_g.value(t));
    };

    auto apply_events_at = [&](double t) {
        for (const auto& ev : events) {
            if (std::abs(ev.t_s - t) < kTimeMergeTol)
                state = apply_fault_event(state, ev.v_before, ev.v_after);
        }
    };

    apply_events_at(0.0);
    record(0.0);
    double next_out = cfg.out_dt_s;

    for (size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        const double ta = bounds[seg];
        const double tb = bounds[seg + 1];
        if (ta > 0.0) apply_events_at(ta);

        FrozenInputs frozen{freeze(signals.id, ta), freeze(signals.iq, ta),
                            freeze(signals.vg_mag, ta), freeze(signals.omega_g, ta)};
        auto f = [&](double t, const RomState& y) { return rhs(y, frozen.at(t), p); };

        const long n = std::max(1L, std::lround((tb - ta) / cfg.dt_s));
        const double h = (tb - ta) / static_cast<double>(n);

        for (long k = 0; k < n; ++k) {
            const double t0 = ta + h * static_cast<double>(k);
            auto k1 = f(t0, state);
            auto k2 = f(t0 + 0.5 * h,
                        {state.delta + 0.5 * h * k1[0], state.delta_dot + 0.5 * h * k1[1]});
            auto k3 = f(t0 + 0.5 * h,
                        {state.delta + 0.5 * h * k2[0], state.delta_dot + 0.5 * h * k2[1]});
            auto k4 = f(t0 + h,
                        {state.delta + h * k3[0], state.delta_dot + h * k3[1]});
            state.delta += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            state.delta_dot += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);

            const double t1 = (k + 1 == n) ? tb : t0 + h;
            if (std::abs(state.delta_dot) > cfg.divergence_limit_radps ||
                !std::isfinite(state.delta) || !std::isfinite(state.delta_dot)) {
                out.diverged = true;
                out.t_diverged = t1;
                record(t1);
                return out;
            }
            if (t1 >= next_out - 1e-9) {
                record(t1);
                do {
                    next_out += cfg.out_dt_s;
                } while (next_out <= t1 + 1e-9);
            }
        }
    }

    if (out.t.empty() || out.t.back() < t_end_s - kTimeMergeTol) record(t_end_s);
    return out;
}

BisectionResult bisect_clearing_time(
    const std::function<bool(double)>& stable_when_cleared_at, double window_lo,
    double window_hi, double tol) {
    if (!(window_lo < window_hi) || !(tol > 0.0))
        throw ValidationError("bisection window must be ordered and tol positive",
                              "cct_window");

    BisectionResult res{};
    res.bracket_runs = 2;
    if (!stable_when_cleared_at(window_lo))
        throw BracketInvalid("clearing at the window start is already unstable");
    if (stable_when_cleared_at(window_hi))
        throw BracketInvalid("clearing at the window end is still stable");

    double lo = window_lo, hi = window_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        ++res.bisection_runs;
        if (stable_when_cleared_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    res.t_clear = 0.5 * (lo + hi);
    return res;
}

}  // namespace wtrom::rom
