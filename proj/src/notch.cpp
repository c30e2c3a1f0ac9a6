#include "wtrom/notch.hpp"

#include <cmath>

namespace wtrom {

NotchBiquad NotchBiquad::design(double omega_n_radps, double zeta, double dt_s) {
    if (!(omega_n_radps > 0.0) || !(zeta > 0.0) || !(dt_s > 0.0))
        throw ValidationError("notch center, damping and step must be positive",
                              "notch_design");
    if (omega_n_radps * dt_s >= 3.14159265358979323846)
        throw ValidationError("notch center at or above the Nyquist rate",
                              "notch_nyquist");

    const double wn = omega_n_radps;
    const double k = wn / std::tan(wn * dt_s / 2.0);
    const double a0 = k * k + 2.0 * zeta * wn * k + wn * wn;

    NotchBiquad n;
    n.dt_s = dt_s;
    n.b0 = (k * k + wn * wn) / a0;
    n.b1 = 2.0 * (wn * wn - k * k) / a0;
    n.b2 = n.b0;
    n.a1 = n.b1;
    n.a2 = (k * k - 2.0 * zeta * wn * k + wn * wn) / a0;
    return n;
}

std::complex<double> NotchBiquad::frequency_response(double omega_radps) const {
    const std::complex<double> zi = std::exp(std::complex<double>(0.0, -omega_radps * dt_s));
    return (b0 + (b1 + b2 * zi) * zi) / (1.0 + (a1 + a2 * zi) * zi);
}

}  // namespace wtrom
