#pragma once

#include <array>
#include <functional>
#include <vector>

#include "wtrom/signal.hpp"
#include "wtrom/trajectory.hpp"
#include "wtrom/types.hpp"

namespace wtrom::rom {

struct RomParams {
    double kp = 0.025;   // PLL proportional gain, (rad/s) per pu
    double ki = 1.5;     // PLL integral gain, (rad/s^2) per pu
    double lg = 0.06;    // grid branch inductance, pu
    double r_lg = 0.0037;  // grid branch resistance, pu
    // Nominal frequency. Inside the torque products omega_g is used per
    // unit (nominal 1.0); only the frequency-ramp feedthrough term keeps
    // rad/s, and this constant does the conversion between the two.
    double omega0_radps = 2.0 * pi * 50.0;
};

// delta is the PLL angle minus the reference-phasor angle, rad.
struct RomState {
    double delta = 0.0;
    double delta_dot = 0.0;  // rad/s
};

// Inputs at one instant. Derivatives are exact derivatives of the
// piecewise-linear schedules, so lg_iq_ddot is zero between breakpoints.
struct RomInputsAtT {
    double id = 0.0;
    double id_dot = 0.0;        // pu/s
    double iq = 0.0;
    double iq_dot = 0.0;        // pu/s
    double lg_iq_ddot = 0.0;    // pu/s^2, second derivative of lg*iq
    double vg_mag = 1.0;
    double vg_mag_dot = 0.0;    // pu/s
    double omega_g = 2.0 * pi * 50.0;  // rad/s
    double omega_g_dot = 0.0;          // rad/s^2
};

struct SwingCoefficients {
    double m;    // equivalent inertia
    double t_m;  // driving torque from current schedules
    double t_e;  // restoring torque plus frequency-ramp feedthrough
    double d;    // damping coefficient
};

// Evaluates the swing coefficients at one state/input point. Throws
// SingularInertia when |m| < 1e-9.
SwingCoefficients coefficients(const RomState& s, const RomInputsAtT& in,
                               const RomParams& p);

// Swing dynamics d/dt (delta, delta_dot). Second component is
// (t_m - t_e - d * delta_dot) / m.
std::array<double, 2> rhs(const RomState& s, const RomInputsAtT& in,
                          const RomParams& p);

// Steady-state angle for constant inputs: sin(delta*) =
// (r_lg*iq + lg*id*omega_g_pu) / vg_mag, stable branch |delta*| < pi/2.
// Throws ValidationError when the sine argument leaves [-1, 1].
double equilibrium_delta(double id, double iq, double vg_mag, double omega_g_pu,
                         const RomParams& p);

// Reference-phasor rotation across a network event, guarded against a dead
// bus on either side (angle is then carried over, giving a zero jump).
double phase_jump(Phasor v_before, Phasor v_after);

// The PLL angle is continuous through a network event while the reference
// phasor rotates, so delta jumps by the phasor rotation and delta_dot
// carries through untouched.
RomState apply_fault_event(const RomState& s, Phasor v_before, Phasor v_after);

struct RomSignals {
    PiecewiseLinearSignal id;       // pu
    PiecewiseLinearSignal iq;       // pu
    PiecewiseLinearSignal vg_mag;   // pu, effective source magnitude
    PiecewiseLinearSignal omega_g;  // rad/s
};

struct RomEvent {
    double t_s = 0.0;
    Phasor v_before{1.0, 0.0};
    Phasor v_after{1.0, 0.0};
    std::string label;
};

struct SolverConfig {
    double dt_s = 50e-6;
    double out_dt_s = 100e-6;
    double divergence_limit_radps = 10.0 * 2.0 * pi * 50.0;
};

// Classical fourth-order fixed-step integration, segmented at every event
// and signal breakpoint so each segment sees smooth inputs. A divergence
// classification stops the run and is recorded on the trajectory, not
// thrown.
Trajectory integrate(RomState init, double t_end_s, const RomSignals& signals,
                     const std::vector<RomEvent>& events, const RomParams& p,
                     const SolverConfig& cfg);

struct BisectionResult {
    double t_clear = 0.0;
    int bisection_runs = 0;
    int bracket_runs = 0;
};

// Bisects the clearing time between a stable and an unstable window
// endpoint until the bracket width drops below tol. The classifier is
// invoked once per endpoint up front; BracketInvalid when the endpoints
// do not straddle the stability boundary.
BisectionResult bisect_clearing_time(
    const std::function<bool(double)>& stable_when_cleared_at, double window_lo,
    double window_hi, double tol);

}  // namespace wtrom::rom
