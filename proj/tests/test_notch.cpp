#include "doctest.h"

#include <cmath>

#include "wtrom/notch.hpp"
#include "wtrom/types.hpp"

using wtrom::NotchBiquad;
using wtrom::pi;
using wtrom::ValidationError;

namespace {
constexpr double kDt = 50e-6;
constexpr double kWn = 2.0 * 2.0 * pi * 50.0;  // 100 Hz
}  // namespace

TEST_CASE("coefficient sums pin unity gain at DC and Nyquist") {
    auto n = NotchBiquad::design(kWn, 0.02, kDt);
    // H(1) = (b0+b1+b2)/(1+a1+a2), H(-1) = (b0-b1+b2)/(1-a1+a2)
    CHECK(n.b0 + n.b1 + n.b2 == doctest::Approx(1.0 + n.a1 + n.a2).epsilon(1e-15));
    CHECK(n.b0 - n.b1 + n.b2 == doctest::Approx(1.0 - n.a1 + n.a2).epsilon(1e-15));
    CHECK(std::abs(n.frequency_response(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(n.frequency_response(pi / kDt * 0.999999)) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("transmission zero sits exactly on the center frequency") {
    for (double zeta : {0.01, 0.02, 0.05, 0.2}) {
        auto n = NotchBiquad::design(kWn, zeta, kDt);
        CHECK(std::abs(n.frequency_response(kWn)) < 1e-10);  // < -200 dB
    }
}

TEST_CASE("skirt stays flat a decade away from the center") {
    auto n = NotchBiquad::design(kWn, 0.05, kDt);
    for (double w : {0.1 * kWn, 10.0 * kWn}) {
        const double gain_db = 20.0 * std::log10(std::abs(n.frequency_response(w)));
        CHECK(std::abs(gain_db) < 0.5);
    }
}

TEST_CASE("poles stay inside the unit circle") {
    for (double zeta : {0.005, 0.02, 0.3}) {
        auto n = NotchBiquad::design(kWn, zeta, kDt);
        CHECK(n.a2 < 1.0);                       // product of pole radii
        CHECK(std::abs(n.a1) < 1.0 + n.a2);      // stability triangle
    }
}

TEST_CASE("steady sine at the center is removed in the time domain") {
    auto n = NotchBiquad::design(kWn, 0.02, kDt);
    double peak = 0.0;
    for (double t = 0.0; t < 4.0; t += kDt) {
        double y = n.process(std::sin(kWn * t));
        if (t > 3.0) peak = std::max(peak, std::abs(y));
    }
    CHECK(peak < 1e-3);

    SUBCASE("a DC level passes through unchanged") {
        n.reset();
        double y = 0.0;
        for (int i = 0; i < 200000; ++i) y = n.process(0.4);
        CHECK(y == doctest::Approx(0.4).epsilon(1e-9));
    }
}

TEST_CASE("design rejects degenerate requests") {
    CHECK_THROWS_AS(NotchBiquad::design(0.0, 0.02, kDt), ValidationError);
    CHECK_THROWS_AS(NotchBiquad::design(kWn, -0.1, kDt), ValidationError);
    CHECK_THROWS_AS(NotchBiquad::design(kWn, 0.02, 0.0), ValidationError);
    // center above Nyquist for this step
    CHECK_THROWS_AS(NotchBiquad::design(pi / kDt, 0.02, kDt), ValidationError);
}
