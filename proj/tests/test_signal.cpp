#include "doctest.h"

#include "wtrom/signal.hpp"

using wtrom::AffineView;
using wtrom::PiecewiseLinearSignal;
using wtrom::ValidationError;

TEST_CASE("constant signal evaluates everywhere with zero slope") {
    auto s = PiecewiseLinearSignal::constant(0.73);
    CHECK(s.value(-5.0) == 0.73);
    CHECK(s.value(0.0) == 0.73);
    CHECK(s.value(42.0) == 0.73);
    CHECK(s.slope(0.0) == 0.0);
    CHECK(s.slope(3.0) == 0.0);
}

TEST_CASE("two-point ramp interpolates inside and clamps outside") {
    PiecewiseLinearSignal s;
    s.add(0.4, 0.0);
    s.add(0.9, 1.0);
    CHECK(s.value(0.4) == doctest::Approx(0.0));
    CHECK(s.value(0.65) == doctest::Approx(0.5));
    CHECK(s.value(0.9) == doctest::Approx(1.0));
    CHECK(s.value(0.1) == 0.0);
    CHECK(s.value(2.0) == 1.0);
    CHECK(s.slope(0.5) == doctest::Approx(2.0));
    CHECK(s.slope(0.1) == 0.0);
    CHECK(s.slope(0.9) == 0.0);   // right-continuous: past the last breakpoint
    CHECK(s.slope(1.5) == 0.0);
}

TEST_CASE("repeated breakpoint time encodes a right-continuous step") {
    PiecewiseLinearSignal s;
    s.add(0.0, 1.0);
    s.add(0.2, 1.0);
    s.add(0.2, 0.73);   // fault applied
    s.add(0.4, 0.73);
    s.add(0.4, 1.0);    // fault cleared
    CHECK(s.value(0.1999999) == doctest::Approx(1.0));
    CHECK(s.value(0.2) == 0.73);
    CHECK(s.value(0.3) == 0.73);
    CHECK(s.value(0.4) == 1.0);
    CHECK(s.value(0.5) == 1.0);
    CHECK(s.slope(0.2) == 0.0);
    CHECK(s.slope(0.3) == 0.0);
}

TEST_CASE("breakpoints must be non-decreasing") {
    PiecewiseLinearSignal s;
    s.add(0.2, 1.0);
    CHECK_THROWS_AS(s.add(0.1, 2.0), ValidationError);
    CHECK_NOTHROW(s.add(0.2, 3.0));
}

TEST_CASE("freeze snapshots the post-step value and segment slope") {
    PiecewiseLinearSignal s;
    s.add(0.0, 0.0);
    s.add(0.1, 0.0);
    s.add(0.1, 0.5);    // step, then ramp toward 1.0
    s.add(0.6, 1.0);
    AffineView v = wtrom::freeze(s, 0.1);
    CHECK(v.value(0.1) == doctest::Approx(0.5));
    CHECK(v.slope() == doctest::Approx(1.0));
    CHECK(v.value(0.35) == doctest::Approx(s.value(0.35)));
    // extrapolation past the segment keeps the frozen affine law
    CHECK(v.value(0.7) == doctest::Approx(0.5 + 1.0 * 0.6));
}
