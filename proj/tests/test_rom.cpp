#include "doctest.h"

#include <cmath>
#include <complex>

#include "wtrom/rom.hpp"

using namespace wtrom;
using namespace wtrom::rom;

namespace {

RomInputsAtT steady_inputs(double id, double iq, double vg_mag, const RomParams& p) {
    RomInputsAtT in{};
    in.id = id;
    in.iq = iq;
    in.vg_mag = vg_mag;
    in.omega_g = p.omega0_radps;
    return in;
}

// Independent root find of the torque balance: bisect accel=0 in delta over
// the stable branch, no trig inverse involved.
double bisect_equilibrium(double id, double iq, double vg_mag, const RomParams& p) {
    auto accel = [&](double delta) {
        return rhs({delta, 0.0}, steady_inputs(id, iq, vg_mag, p), p)[1];
    };
    double lo = -pi / 2.0, hi = pi / 2.0;
    REQUIRE(accel(lo) * accel(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (accel(lo) * accel(mid) <= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("swing coefficients at the rated operating point") {
    RomParams p;
    auto in = steady_inputs(1.0, -0.1, 1.0, p);
    auto c = coefficients({0.0, 0.0}, in, p);
    CHECK(c.m == doctest::Approx(0.9985).epsilon(1e-14));
    CHECK(c.t_m == doctest::Approx(0.089445).epsilon(1e-14));
    CHECK(c.t_e == doctest::Approx(0.0));
    CHECK(c.d == doctest::Approx(0.025 - 0.09).epsilon(1e-14));

    // at the equilibrium angle the damping picks up the cosine factor
    double ds = equilibrium_delta(1.0, -0.1, 1.0, 1.0, p);
    auto ce = coefficients({ds, 0.0}, in, p);
    CHECK(ce.d == doctest::Approx(-0.0650444862918532).epsilon(1e-12));
}

TEST_CASE("frequency ramp feeds through the inertia term in rad/s^2") {
    RomParams p;
    auto in = steady_inputs(1.0, -0.1, 1.0, p);
    in.omega_g_dot = 2.0 * pi * 1.0;  // 1 Hz/s event
    auto c = coefficients({0.0, 0.0}, in, p);
    CHECK(c.t_e == doctest::Approx(c.m * 2.0 * pi).epsilon(1e-14));
}

TEST_CASE("equilibrium angle closes the torque balance") {
    RomParams p;
    double ds = equilibrium_delta(1.0, -0.1, 1.0, 1.0, p);
    CHECK(ds == doctest::Approx(0.0596653947623652).epsilon(1e-13));
    CHECK(ds == doctest::Approx(bisect_equilibrium(1.0, -0.1, 1.0, p)).epsilon(1e-12));
    auto r = rhs({ds, 0.0}, steady_inputs(1.0, -0.1, 1.0, p), p);
    CHECK(std::abs(r[1]) < 1e-10);

    SUBCASE("restoring torque pushes back toward the equilibrium") {
        auto hi = rhs({ds + 0.3, 0.0}, steady_inputs(1.0, -0.1, 1.0, p), p);
        auto lo = rhs({ds - 0.3, 0.0}, steady_inputs(1.0, -0.1, 1.0, p), p);
        CHECK(hi[1] < 0.0);
        CHECK(lo[1] > 0.0);
    }
}

TEST_CASE("equilibrium rejects dead sources and infeasible drops") {
    RomParams p;
    CHECK_THROWS_AS(equilibrium_delta(1.0, -0.1, 0.0, 1.0, p), ValidationError);
    CHECK_THROWS_AS(equilibrium_delta(20.0, 0.0, 1.0, 1.0, p), ValidationError);
}

TEST_CASE("inertia degenerates when kp*lg*id reaches one") {
    RomParams p;
    auto in = steady_inputs(1.0 / (p.kp * p.lg), 0.0, 1.0, p);
    CHECK_THROWS_AS(coefficients({0.0, 0.0}, in, p),
                    SingularInertia);
}

TEST_CASE("linearization matches the analytic eigenvalue pair") {
    RomParams p;
    const double id = 1.0, iq = -0.1, vg = 1.0;
    double ds = equilibrium_delta(id, iq, vg, 1.0, p);
    auto in = steady_inputs(id, iq, vg, p);

    // numeric Jacobian of (delta, delta_dot) -> rhs by central differences
    const double h = 1e-6;
    double j00, j01, j10, j11;
    {
        auto fp = rhs({ds + h, 0.0}, in, p), fm = rhs({ds - h, 0.0}, in, p);
        j00 = (fp[0] - fm[0]) / (2 * h);
        j10 = (fp[1] - fm[1]) / (2 * h);
    }
    {
        auto fp = rhs({ds, h}, in, p), fm = rhs({ds, -h}, in, p);
        j01 = (fp[0] - fm[0]) / (2 * h);
        j11 = (fp[1] - fm[1]) / (2 * h);
    }
    CHECK(j00 == doctest::Approx(0.0));
    CHECK(j01 == doctest::Approx(1.0));

    auto c = coefficients({ds, 0.0}, in, p);
    const double k_lin = p.ki * vg * std::cos(ds);
    CHECK(j10 == doctest::Approx(-k_lin / c.m).epsilon(1e-7));
    CHECK(j11 == doctest::Approx(-c.d / c.m).epsilon(1e-7));

    // eigenvalues of [[0,1],[j10,j11]] against (-D +- sqrt(D^2-4MK)) / 2M
    std::complex<double> disc(c.d * c.d - 4.0 * c.m * k_lin, 0.0);
    auto lam = (-c.d + std::sqrt(disc)) / (2.0 * c.m);
    auto tr = j00 + j11;
    auto det = j00 * j11 - j01 * j10;
    std::complex<double> dn(tr * tr - 4.0 * det, 0.0);
    auto lam_num = (tr + std::sqrt(dn)) / 2.0;
    CHECK(lam.real() == doctest::Approx(lam_num.real()).epsilon(1e-6));
    CHECK(std::abs(lam.imag()) == doctest::Approx(std::abs(lam_num.imag())).epsilon(1e-6));
    CHECK(lam.real() == doctest::Approx(0.0325710997956200).epsilon(1e-6));
    CHECK(std::abs(lam.imag()) == doctest::Approx(1.2241402355269903).epsilon(1e-6));
}

TEST_CASE("phase jump rotates the angle by the source phase loss") {
    using namespace std::complex_literals;
    Phasor before = std::polar(1.0, 0.0);
    Phasor after = std::polar(0.73, -10.0 * pi / 180.0);
    CHECK(phase_jump(before, after) == doctest::Approx(10.0 * pi / 180.0).epsilon(1e-15));

    SUBCASE("dead bus on either side yields no jump") {
        CHECK(phase_jump(before, 1e-12 + 0.0i) == 0.0);
        CHECK(phase_jump(1e-12 + 0.0i, after) == 0.0);
    }
    SUBCASE("applying the event and its reverse restores the state bit-exactly") {
        RomState s{0.7253, -0.11};
        auto jumped = apply_fault_event(s, before, after);
        auto restored = apply_fault_event(jumped, after, before);
        CHECK(restored.delta == s.delta);
        CHECK(restored.delta_dot == s.delta_dot);
    }
}

TEST_CASE("pure resistive torque gives an exact quadratic angle ramp") {
    // id = 0 and vg = 0 leave a constant accel t_m/m = ki*r_lg*iq
    RomParams p;
    RomSignals sig{PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(-0.5),
                   PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    const double a = p.ki * p.r_lg * (-0.5);
    CHECK(a == doctest::Approx(-0.002775).epsilon(1e-15));

    auto tr = integrate({0.1, 0.0}, 0.5, sig, {}, p, {});
    REQUIRE(!tr.t.empty());
    CHECK(tr.diverged == false);
    CHECK(tr.t.back() == doctest::Approx(0.5));
    for (size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.t[i];
        CHECK(tr.delta[i] == doctest::Approx(0.1 + 0.5 * a * t * t).epsilon(1e-13));
        CHECK(tr.delta_dot[i] == doctest::Approx(a * t).epsilon(1e-13));
    }
}

TEST_CASE("trajectory started at the equilibrium stays there") {
    RomParams p;
    double ds = equilibrium_delta(1.0, -0.1, 1.0, 1.0, p);
    RomSignals sig{PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(-0.1),
                   PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    auto tr = integrate({ds, 0.0}, 0.2, sig, {}, p, {});
    for (size_t i = 0; i < tr.size(); ++i) {
        CHECK(std::abs(tr.delta[i] - ds) < 1e-12);
        CHECK(std::abs(tr.delta_dot[i]) < 1e-12);
    }
}

TEST_CASE("fourth-order convergence on a stiff swing") {
    // fast gains so the discretization error sits well above roundoff
    RomParams p;
    p.kp = 14.0;
    p.ki = 844.0;
    double ds = equilibrium_delta(0.0, -0.5, 1.0, 1.0, p);
    RomSignals sig{PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(-0.5),
                   PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    RomState init{ds + 0.5, 0.0};

    auto end_delta = [&](double dt) {
        SolverConfig cfg;
        cfg.dt_s = dt;
        cfg.out_dt_s = dt;
        auto tr = integrate(init, 0.5, sig, {}, p, cfg);
        REQUIRE(!tr.diverged);
        return tr.delta.back();
    };

    const double ref = end_delta(6.25e-6);
    const double e400 = std::abs(end_delta(400e-6) - ref);
    const double e200 = std::abs(end_delta(200e-6) - ref);
    const double e100 = std::abs(end_delta(100e-6) - ref);
    REQUIRE(e400 > 1e-12);  // errors must sit above the noise floor
    CHECK(e400 / e200 == doctest::Approx(16.0).epsilon(0.3));
    CHECK(e200 / e100 == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("events jump the angle between segments") {
    RomParams p;
    RomSignals sig{PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(-0.1),
                   PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    double ds = equilibrium_delta(1.0, -0.1, 1.0, 1.0, p);
    RomEvent ev{0.1, std::polar(1.0, 0.0), std::polar(0.73, -0.1), "fault_on"};
    auto tr = integrate({ds, 0.0}, 0.2, sig, {ev}, p, {});

    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].t_s == 0.1);
    CHECK(tr.events[0].label == "fault_on");

    // sample at the boundary is pre-jump, the next one carries the +0.1 shift
    size_t i_ev = 0;
    while (tr.t[i_ev] < 0.1 - 1e-12) ++i_ev;
    CHECK(tr.delta[i_ev] == doctest::Approx(ds).epsilon(1e-9));
    CHECK(tr.delta[i_ev + 1] - tr.delta[i_ev] == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("crossing the speed limit flags divergence instead of throwing") {
    RomParams p;
    RomSignals sig{PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(-0.5),
                   PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    SolverConfig cfg;
    cfg.divergence_limit_radps = 1e-3;
    auto tr = integrate({0.0, 0.0}, 1.0, sig, {}, p, cfg);
    CHECK(tr.diverged == true);
    // |delta_dot| = 0.002775 t crosses 1e-3 at t = 0.36036 s
    CHECK(tr.t_diverged == doctest::Approx(0.36036).epsilon(1e-3));
    CHECK(tr.t.back() == tr.t_diverged);
    CHECK(tr.t.back() < 0.5);
}

TEST_CASE("solver configuration is validated") {
    RomParams p;
    RomSignals sig{PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(0.0),
                   PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    SolverConfig bad_dt;
    bad_dt.dt_s = 0.0;
    CHECK_THROWS_AS(integrate({0, 0}, 1.0, sig, {}, p, bad_dt), ValidationError);

    SolverConfig bad_out;
    bad_out.out_dt_s = bad_out.dt_s / 2.0;
    CHECK_THROWS_AS(integrate({0, 0}, 1.0, sig, {}, p, bad_out), ValidationError);

    RomEvent late{2.0, 1.0, 1.0, "x"};
    CHECK_THROWS_AS(integrate({0, 0}, 1.0, sig, {late}, p, {}), ValidationError);
    RomEvent early{-0.5, 1.0, 1.0, "x"};
    CHECK_THROWS_AS(integrate({0, 0}, 1.0, sig, {early}, p, {}), ValidationError);
}

TEST_CASE("output grid is uniform and strictly increasing") {
    RomParams p;
    RomSignals sig{PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(-0.1),
                   PiecewiseLinearSignal::constant(1.0),
                   PiecewiseLinearSignal::constant(p.omega0_radps)};
    // breakpoint off the output grid forces a stretched step inside one segment
    sig.vg_mag = PiecewiseLinearSignal::constant(1.0);
    sig.vg_mag.add(0.050130, 1.0);
    sig.vg_mag.add(0.050130, 0.8);
    auto tr = integrate({0.05, 0.0}, 0.1, sig, {}, p, {});
    for (size_t i = 1; i < tr.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
    CHECK(tr.size() > 900);
    CHECK(tr.t.back() == doctest::Approx(0.1));
}

TEST_CASE("clearing-time bisection on a synthetic classifier") {
    const double truth = 0.123456;
    int calls = 0;
    auto classify = [&](double t) {
        ++calls;
        return t <= truth;
    };
    auto res = bisect_clearing_time(classify, 0.05, 0.35, 1e-3);
    CHECK(res.bracket_runs == 2);
    CHECK(res.bisection_runs == 9);  // ceil(log2(0.3 / 1e-3))
    CHECK(calls == res.bracket_runs + res.bisection_runs);
    CHECK(std::abs(res.t_clear - truth) < 1e-3);

    SUBCASE("brackets that do not straddle the boundary are rejected") {
        CHECK_THROWS_AS(bisect_clearing_time([](double) { return false; }, 0.0, 1.0, 1e-3),
                        BracketInvalid);
        CHECK_THROWS_AS(bisect_clearing_time([](double) { return true; }, 0.0, 1.0, 1e-3),
                        BracketInvalid);
    }
    SUBCASE("window and tolerance are validated") {
        CHECK_THROWS_AS(bisect_clearing_time(classify, 0.4, 0.1, 1e-3), ValidationError);
        CHECK_THROWS_AS(bisect_clearing_time(classify, 0.1, 0.4, 0.0), ValidationError);
    }
}
