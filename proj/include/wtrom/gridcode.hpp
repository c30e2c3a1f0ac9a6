#pragma once

#include <limits>
#include <string>
#include <vector>

#include "wtrom/types.hpp"

namespace wtrom::gridcode {

struct GridCodeParams {
    double k_pos = 2.0;         // pu reactive current per pu positive-sequence sag
    double k_neg = 2.0;         // pu reactive current per pu negative-sequence voltage
    double deadband_pu = 0.0;   // voltage deviation tolerated before injecting
    double iq_total_max = 1.0;  // cap on |iq_pos| + |iq_neg|
    double i_total_max = 1.0;   // converter current capability
    bool positive_priority = true;  // which sequence keeps its share when the cap binds
    double id_post_ramp_pups =
        std::numeric_limits<double>::infinity();  // post-clear recovery rate
};

// Hard violations throw ValidationError; soft ones (gains outside the
// customary 2..6 band) come back as warning strings for the caller to log.
std::vector<std::string> validate(const GridCodeParams& p);

// Voltage-support current references for a given terminal voltage pair.
// Positive-sequence support is capacitive, so iq_pos comes out negative;
// iq_neg is a magnitude. id fills whatever capability remains after both
// reactive terms are reserved, never exceeding id_request.
CurrentRefs lvrt_references(double v_pos_mag, double v_neg_mag,
                            const GridCodeParams& p, double id_request);

// Post-clear active-current recovery: ramps from the fault-period value
// toward id_target at ramp_pups (pu per second). An infinite rate steps.
double ramp_limited_id(double t_s, double t_clear_s, double id_target,
                       double id_at_clear, double ramp_pups);

struct FixedPointResult {
    CurrentRefs refs;
    Phasor v_pos;
    Phasor v_neg;
    int iterations = 0;
    std::vector<double> residuals;  // max ref change per iteration
};

// Self-consistent (voltage, current) operating point during a fault:
// alternates lvrt_references with the coupled network solve until the
// reference change drops below tol. Throws NoConvergence past max_iter.
FixedPointResult fixed_point_references(FaultKind kind, Phasor vg,
                                        const SequenceImpedanceSet& z, double zf_pu,
                                        const GridCodeParams& p, double id_request,
                                        double tol = 1e-10, int max_iter = 100);

}  // namespace wtrom::gridcode
