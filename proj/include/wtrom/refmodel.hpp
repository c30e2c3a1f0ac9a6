#pragma once

#include <array>
#include <string>
#include <vector>

#include "wtrom/notch.hpp"
#include "wtrom/rom.hpp"
#include "wtrom/seqnet.hpp"
#include "wtrom/signal.hpp"
#include "wtrom/trajectory.hpp"
#include "wtrom/types.hpp"

namespace wtrom::refmodel {

// Network topology over one time interval. Balanced sags enter through
// source_scale with the shunt branch left open; unbalanced faults connect
// the coupled sequence circuits through zf_pu.
struct RefSegment {
    double t_start_s = 0.0;
    bool faulted = false;
    FaultKind kind = FaultKind::SLG_A;
    double zf_pu = 0.0;
    Phasor source_scale{1.0, 0.0};
    std::string label;
};

struct RefModelInputs {
    double vg_mag = 1.0;            // source magnitude, pu
    SequenceImpedanceSet z;
    // Series branch between the network node and the voltage measurement.
    // A current source behind it leaves the node voltages unchanged, so it
    // only offsets what the synchronization loop sees: v_meas = v + zc i.
    SequenceImpedance zc{0.0, 0.0};
    PiecewiseLinearSignal id_ref = PiecewiseLinearSignal::constant(0.0);
    PiecewiseLinearSignal iq_pos_ref = PiecewiseLinearSignal::constant(0.0);
    PiecewiseLinearSignal iq_neg_ref = PiecewiseLinearSignal::constant(0.0);
    PiecewiseLinearSignal omega_g =
        PiecewiseLinearSignal::constant(2.0 * pi * 50.0);  // rad/s
    std::vector<RefSegment> segments{RefSegment{}};
};

struct RefModelParams {
    rom::RomParams rom;      // shared loop gains and grid branch constants
    NotchParams notch;
    double cc_tau_s = 2e-3;  // closed-loop current tracking lag
    // below this magnitude the measured v_neg angle is noise; the
    // injection direction falls back to the PLL frame
    double v_neg_track_min_pu = 1e-6;
};

// Instantaneous phase voltages from sequence phasors, amplitude-invariant
// scaling, zero sequence omitted (no zero-sequence path at the terminal).
// The negative set runs with reversed phase order.
std::array<double, 3> synthesize_abc(Phasor v_pos, Phasor v_neg, double theta_g);

// Amplitude-invariant Clarke followed by a rotation to the angle frame:
// returns (v_d, v_q).
std::array<double, 2> park_dq(const std::array<double, 3>& abc, double theta);

// Steps the phase-locked synchronization loop over [0, t_end]: current
// lag, quasi-static network solve, waveform synthesis, notch, PI. The
// reported angle is theta_pll - theta_g and its rate uses the PI output
// directly, so a frequency event shows up only through real dynamics.
Trajectory simulate(const RefModelInputs& in, double t_end_s,
                    const RefModelParams& p, const rom::SolverConfig& cfg);

}  // namespace wtrom::refmodel
