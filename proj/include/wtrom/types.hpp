#pragma once

#include <complex>
#include <numbers>
#include <string>

#include "wtrom/errors.hpp"

namespace wtrom {

// dq convention used throughout: d maps to the real axis, q to the
// imaginary axis, so a current reference (id, iq) is the phasor id + j iq.
using Phasor = std::complex<double>;

constexpr double pi = std::numbers::pi;

inline double mag(Phasor v) { return std::abs(v); }
inline double ang(Phasor v) { return std::arg(v); }

// One sequence branch as series resistance and inductive reactance, both
// per unit. Reactance is given at nominal frequency; z() scales it by the
// per-unit frequency of evaluation.
struct SequenceImpedance {
    double r_pu = 0.0;
    double l_pu = 0.0;

    Phasor z(double omega_pu = 1.0) const { return {r_pu, omega_pu * l_pu}; }
    bool is_zero() const { return r_pu == 0.0 && l_pu == 0.0; }
};

// Grid branches for the three sequence networks. Negative and zero
// sequence default to the positive-sequence values when a scenario does
// not override them.
struct SequenceImpedanceSet {
    SequenceImpedance zg1;
    SequenceImpedance zg2;
    SequenceImpedance zg0;
};

struct BaseQuantities {
    double s_base_va = 12e6;
    double v_base_ll_v = 690.0;  // line-to-line RMS
    double f0_hz = 50.0;

    double z_base_ohm() const { return v_base_ll_v * v_base_ll_v / s_base_va; }
    double omega0_radps() const { return 2.0 * pi * f0_hz; }
};

// Converts an ohmic fault impedance onto the scenario base. Values already
// per unit pass through unchanged.
inline double to_pu_impedance(double value, const std::string& unit,
                              const BaseQuantities& base) {
    if (unit == "pu") return value;
    if (unit == "ohm") return value / base.z_base_ohm();
    throw ValidationError("impedance unit must be 'ohm' or 'pu', got '" + unit + "'",
                          "impedance_unit");
}

enum class FaultKind {
    SLG_A,         // single line to ground, phase a
    DLG_BC,        // double line to ground, phases b and c
    DL_BC,         // line to line, phases b and c
    BALANCED_3PH,  // handled as retained-voltage scaling of the source
};

inline std::string to_string(FaultKind k) {
    switch (k) {
        case FaultKind::SLG_A: return "slg_a";
        case FaultKind::DLG_BC: return "dlg_bc";
        case FaultKind::DL_BC: return "dl_bc";
        case FaultKind::BALANCED_3PH: return "balanced_3ph";
    }
    return "?";
}

struct FaultSpec {
    FaultKind kind = FaultKind::SLG_A;
    double zf_pu = 0.0;       // fault impedance, already on the scenario base
    double t_on_s = 0.2;
    double t_clear_s = 0.4;   // ignored when cleared == false
    bool cleared = true;
};

// Converter current references in the PLL dq frame, per unit. Capacitive
// reactive injection is negative iq_pos; iq_neg is the magnitude of the
// negative-sequence reactive injection.
struct CurrentRefs {
    double id_pos = 0.0;
    double iq_pos = 0.0;
    double iq_neg = 0.0;
};

}  // namespace wtrom
