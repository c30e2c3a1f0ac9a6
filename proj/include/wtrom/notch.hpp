#pragma once

#include <complex>

#include "wtrom/errors.hpp"

namespace wtrom {

// Second-order notch, bilinear-discretized with the warp pinned at the
// center frequency so the transmission zero lands exactly on omega_n.
// Coefficients are normalized to a0 = 1; unity gain holds exactly at DC
// and at the Nyquist rate by construction.
struct NotchBiquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double dt_s = 0.0;

    // direct form II transposed state
    double z1 = 0.0, z2 = 0.0;

    static NotchBiquad design(double omega_n_radps, double zeta, double dt_s);

    double process(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }

    void reset() { z1 = z2 = 0.0; }

    std::complex<double> frequency_response(double omega_radps) const;
};

struct NotchParams {
    bool enabled = true;
    double omega_n_radps = 2.0 * 100.0 * 3.14159265358979323846;  // 2x fundamental
    double zeta = 0.02;
};

}  // namespace wtrom
