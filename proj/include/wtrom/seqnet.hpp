#pragma once

#include "wtrom/types.hpp"

namespace wtrom::seqnet {

// Terminal positive-sequence voltage with the converter feeding the grid
// branch: vg + (id + j iq) * zg1. All quantities per unit, PLL dq frame.
Phasor prefault_voltage_pos(Phasor vg, const CurrentRefs& refs,
                            const SequenceImpedance& zg1, double omega_pu = 1.0);

// Terminal negative-sequence voltage from reactive injection alone:
// (j iq_neg) * zg2. The grid source carries no negative sequence.
Phasor prefault_voltage_neg(const CurrentRefs& refs,
                            const SequenceImpedance& zg2, double omega_pu = 1.0);

// Positive-sequence terminal voltage during the fault, closed form per
// fault kind. BALANCED_3PH is rejected; balanced sags are modelled as
// source scaling, see balanced_retained_scale.
Phasor postfault_voltage_pos(FaultKind kind, Phasor v_pre_pos, Phasor v_pre_neg,
                             const SequenceImpedanceSet& z, double zf_pu,
                             double omega_pu = 1.0);

struct NetworkSolution {
    Phasor v_pos;    // terminal sequence voltages, pu
    Phasor v_neg;
    Phasor v_zero;
    Phasor if_pos;   // sequence currents into the fault branch, pu
    Phasor if_neg;
    Phasor if_zero;
};

// Solves the three coupled sequence circuits with the converter as a
// current source: one KCL row per sequence network plus the phase-domain
// fault constraints mapped through the symmetrical-component operator.
// No series/parallel reduction is performed, which keeps this routine an
// independent cross-check of the closed forms above.
NetworkSolution solve_coupled_network(FaultKind kind, Phasor vg,
                                      Phasor i_pos, Phasor i_neg,
                                      const SequenceImpedanceSet& z, double zf_pu,
                                      double omega_pu = 1.0);

// Convenience overload: i_pos = id + j iq, i_neg = j iq_neg.
NetworkSolution solve_coupled_network(FaultKind kind, Phasor vg,
                                      const CurrentRefs& refs,
                                      const SequenceImpedanceSet& z, double zf_pu,
                                      double omega_pu = 1.0);

// Terminal voltages with no fault branch connected.
NetworkSolution solve_unfaulted(Phasor vg, Phasor i_pos, Phasor i_neg,
                                const SequenceImpedanceSet& z,
                                double omega_pu = 1.0);

// Complex source divider zf / (zg1 + zf) applied to the grid source to
// emulate a balanced sag behind the grid branch. zf = 0 gives a dead
// source, zf -> inf approaches 1.
Phasor balanced_retained_scale(const SequenceImpedance& zg1, double zf_pu,
                               double omega_pu = 1.0);

struct RouteComparison {
    Phasor closed_form;
    Phasor solver;
    double rel_diff = 0.0;  // |closed - solver| / max(|solver|, 1e-12)
    bool flagged = false;   // rel_diff above flag_tol
};

// Runs both routes for the positive-sequence fault voltage and flags a
// disagreement beyond flag_tol. The closed forms bake in a symmetric-grid
// assumption for some kinds, so flagged cases are expected and reported
// rather than treated as errors.
RouteComparison compare_routes(FaultKind kind, Phasor vg, const CurrentRefs& refs,
                               const SequenceImpedanceSet& z, double zf_pu,
                               double flag_tol = 1e-6, double omega_pu = 1.0);

}  // namespace wtrom::seqnet
