#include "wtrom/gridcode.hpp"

#include <algorithm>
#include <cmath>

#include "wtrom/seqnet.hpp"

namespace wtrom::gridcode {

std::vector<std::string> validate(const GridCodeParams& p) {
    if (p.k_pos < 0.0 || p.k_neg < 0.0)
        throw ValidationError("grid-code gains must be non-negative", "gain_sign");
    if (p.deadband_pu < 0.0 || p.deadband_pu > 0.2)
        throw ValidationError("deadband must lie in [0, 0.2] pu", "deadband_range");
    if (p.iq_total_max <= 0.0 || p.i_total_max <= 0.0)
        throw ValidationError("current limits must be positive", "limit_sign");
    if (p.iq_total_max > p.i_total_max)
        throw ValidationError("reactive cap exceeds converter capability",
                              "iq_cap_vs_capability");
    if (!(p.id_post_ramp_pups > 0.0))
        throw ValidationError("recovery ramp rate must be positive", "ramp_sign");

    std::vector<std::string> warnings;
    for (auto [name, k] : {std::pair{"k_pos", p.k_pos}, {"k_neg", p.k_neg}}) {
        if (k != 0.0 && (k < 2.0 || k > 6.0))
            warnings.push_back(std::string(name) + " outside the customary 2..6 band");
    }
    return warnings;
}

CurrentRefs lvrt_references(double v_pos_mag, double v_neg_mag,
                            const GridCodeParams& p, double id_request) {
    const double sag = std::max(0.0, (1.0 - v_pos_mag) - p.deadband_pu);
    const double unb = std::max(0.0, v_neg_mag - p.deadband_pu);

    double iq_pos_abs = p.k_pos * sag;
    double iq_neg = p.k_neg * unb;

    if (p.positive_priority) {
        iq_pos_abs = std::min(iq_pos_abs, p.iq_total_max);
        iq_neg = std::min(iq_neg, p.iq_total_max - iq_pos_abs);
    } else {
        iq_neg = std::min(iq_neg, p.iq_total_max);
        iq_pos_abs = std::min(iq_pos_abs, p.iq_total_max - iq_neg);
    }

    // Reserve the negative-sequence magnitude off the capability before
    // fitting the active current alongside iq_pos, so that
    // sqrt(id^2 + iq_pos^2) + iq_neg never exceeds i_total_max.
    const double headroom = std::max(0.0, p.i_total_max - iq_neg);
    const double id_room2 = headroom * headroom - iq_pos_abs * iq_pos_abs;
    const double id = std::min(std::max(0.0, id_request),
                               std::sqrt(std::max(0.0, id_room2)));

    return CurrentRefs{id, -iq_pos_abs, iq_neg};
}

double ramp_limited_id(double t_s, double t_clear_s, double id_target,
                       double id_at_clear, double ramp_pups) {
    if (!(ramp_pups > 0.0))
        throw ValidationError("id recovery ramp must be positive", "ramp_sign");
    if (std::isinf(ramp_pups)) return id_target;
    const double dt = std::max(0.0, t_s - t_clear_s);
    return std::min(id_target, id_at_clear + ramp_pups * dt);
}

FixedPointResult fixed_point_references(FaultKind kind, Phasor vg,
                                        const SequenceImpedanceSet& z, double zf_pu,
                                        const GridCodeParams& p, double id_request,
                                        double tol, int max_iter) {
    FixedPointResult out;
    out.refs = CurrentRefs{std::max(0.0, id_request), 0.0, 0.0};

    for (int it = 1; it <= max_iter; ++it) {
        auto sol = seqnet::solve_coupled_network(kind, vg, out.refs, z, zf_pu);
        CurrentRefs next =
            lvrt_references(mag(sol.v_pos), mag(sol.v_neg), p, id_request);

        const double residual = std::max({std::abs(next.id_pos - out.refs.id_pos),
                                          std::abs(next.iq_pos - out.refs.iq_pos),
                                          std::abs(next.iq_neg - out.refs.iq_neg)});
        out.refs = next;
        out.v_pos = sol.v_pos;
        out.v_neg = sol.v_neg;
        out.iterations = it;
        out.residuals.push_back(residual);

        if (residual < tol) {
            // Voltages above belong to the previous refs; refresh once so the
            // returned pair is self-consistent to solver precision.
            auto fin = seqnet::solve_coupled_network(kind, vg, out.refs, z, zf_pu);
            out.v_pos = fin.v_pos;
            out.v_neg = fin.v_neg;
            return out;
        }
    }
    throw NoConvergence("grid-code fixed point did not reach tolerance", max_iter);
}

}  // namespace wtrom::gridcode
