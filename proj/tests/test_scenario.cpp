#include <cmath>

#include "doctest.h"
#include "wtrom/scenario.hpp"

using namespace wtrom;
using harness::Scenario;

namespace {

// Exercises every section; numbers chosen distinct so misrouted keys show up.
const char* kFullScenario = R"(schema_version 1

[scenario]
label   demo_case
t_end_s 1.5
vg_mag_pu 0.98

[base]
s_base_va   12e6
v_base_ll_v 690
f0_hz       50

[network]
zg1_r_pu 0.0037
zg1_l_pu 0.06
zg2_r_pu 0.004
zg2_l_pu 0.061
zg0_r_pu 0.011
zg0_l_pu 0.18
zc_r_pu  0.001
zc_l_pu  0.02

[rom]
kp      0.025
ki      1.5
lg_pu   0.06
r_lg_pu 0.0037

[notch]
enabled      true
zeta         0.02
center_radps 628.3185307179587

[cc]
tau_s 0.002

[currents]
mode          explicit
pre_id_pu     1.0
pre_iq_pu     -0.1
pre_iqneg_pu  0.0
fault_id_pu   0.0
fault_iq_pu   -0.625
fault_iqneg_pu 0.5
recovery_ramp_pups 20

[fault]
kind     slg      # phase a to ground
zf_ohm   6.02e-4
t_on_s   0.2
t_clear_s 0.4
cleared  true

[solver]
dt_s     50e-6
out_dt_s 100e-6
divergence_limit_radps 3141.592653589793
)";

}  // namespace

TEST_CASE("full scenario buffer parses with every field routed") {
    Scenario s = harness::parse_scenario(kFullScenario);

    CHECK(s.schema_version == 1);
    CHECK(s.label == "demo_case");
    CHECK(s.t_end_s == doctest::Approx(1.5));
    CHECK(s.vg_mag_pu == doctest::Approx(0.98));

    CHECK(s.z.zg1.r_pu == doctest::Approx(0.0037));
    CHECK(s.z.zg2.l_pu == doctest::Approx(0.061));
    CHECK(s.z.zg0.l_pu == doctest::Approx(0.18));
    CHECK(s.zc.l_pu == doctest::Approx(0.02));

    CHECK(s.params.rom.kp == doctest::Approx(0.025));
    CHECK(s.params.rom.ki == doctest::Approx(1.5));
    CHECK(s.params.rom.omega0_radps == doctest::Approx(2 * pi * 50));
    CHECK(s.params.notch.zeta == doctest::Approx(0.02));
    CHECK(s.params.cc_tau_s == doctest::Approx(0.002));

    CHECK(s.mode == harness::CurrentMode::EXPLICIT);
    CHECK(s.currents.fault_iq_pu == doctest::Approx(-0.625));
    CHECK(s.currents.recovery_ramp_pups == doctest::Approx(20.0));

    CHECK(s.fault.kind == FaultKind::SLG_A);
    // 6.02e-4 ohm on the 690 V / 12 MVA base
    CHECK(s.fault.zf_pu == doctest::Approx(6.02e-4 / 0.039675).epsilon(1e-12));
    CHECK(s.fault.t_on_s == doctest::Approx(0.2));
    CHECK(s.fault.cleared);

    CHECK(s.solver.dt_s == doctest::Approx(50e-6));

    // all sequence impedances were explicit, grid frequency defaulted
    CHECK(s.notices.empty());
    CHECK(s.omega_g.value(0.7) == doctest::Approx(2 * pi * 50));
    CHECK(s.content_hash != 0);
}

TEST_CASE("omitted optional sections fall back with notices") {
    const char* text = R"(schema_version 1
[network]
zg1_r_pu 0.0037
zg1_l_pu 0.06
)";
    Scenario s = harness::parse_scenario(text);

    CHECK(s.z.zg2.r_pu == doctest::Approx(0.0037));
    CHECK(s.z.zg2.l_pu == doctest::Approx(0.06));
    CHECK(s.z.zg0.l_pu == doctest::Approx(0.06));
    REQUIRE(s.notices.size() == 2);
    CHECK(s.notices[0].find("zg2") != std::string::npos);
    CHECK(s.notices[1].find("zg0") != std::string::npos);

    // notch center defaults to twice the grid frequency
    CHECK(s.params.notch.omega_n_radps == doctest::Approx(4 * pi * 50));
    CHECK(s.zc.r_pu == 0.0);
    CHECK(s.zc.l_pu == 0.0);
}

TEST_CASE("parse errors carry the offending line and field") {
    SUBCASE("unknown key") {
        const char* text = "schema_version 1\n[rom]\nkp 0.025\nbogus 3\n";
        try {
            harness::parse_scenario(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 4);
            CHECK(e.field == "bogus");
        }
    }
    SUBCASE("bad numeric literal") {
        const char* text = "schema_version 1\n[rom]\nkp zero\n";
        try {
            harness::parse_scenario(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
            CHECK(e.field == "kp");
        }
    }
    SUBCASE("unknown section") {
        const char* text = "schema_version 1\n[plasma]\nx 1\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ParseError);
    }
    SUBCASE("missing schema_version") {
        CHECK_THROWS_AS(harness::parse_scenario("[rom]\nkp 1\n"), ParseError);
    }
    SUBCASE("trailing token") {
        const char* text = "schema_version 1\n[rom]\nkp 0.025 0.5\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ParseError);
    }
    SUBCASE("key before any section") {
        CHECK_THROWS_AS(harness::parse_scenario("schema_version 1\nkp 1\n"),
                        ParseError);
    }
}

TEST_CASE("validation rejects inconsistent scenarios") {
    SUBCASE("negative fault impedance") {
        const char* text = "schema_version 1\n[fault]\nzf_pu -0.1\n";
        try {
            harness::parse_scenario(text);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.invariant == "zf_sign");
        }
    }
    SUBCASE("fault impedance in both units") {
        const char* text = "schema_version 1\n[fault]\nzf_pu 0.01\nzf_ohm 6e-4\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ValidationError);
    }
    SUBCASE("horizon ends before the fault starts") {
        const char* text =
            "schema_version 1\n[fault]\nt_on_s 0.5\nt_clear_s 0.6\n"
            "[scenario]\nt_end_s 0.3\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ValidationError);
    }
    SUBCASE("clearing before onset") {
        const char* text = "schema_version 1\n[fault]\nt_on_s 0.5\nt_clear_s 0.4\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ValidationError);
    }
    SUBCASE("output decimation finer than the step") {
        const char* text = "schema_version 1\n[solver]\ndt_s 1e-4\nout_dt_s 5e-5\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ValidationError);
    }
    SUBCASE("grid frequency as both constant and points") {
        const char* text =
            "schema_version 1\n[grid_frequency]\nconstant_radps 314\npoint 0 314\n";
        CHECK_THROWS_AS(harness::parse_scenario(text), ValidationError);
    }
}

TEST_CASE("gridcode mode parses and collects saturation notices") {
    const char* text = R"(schema_version 1
[currents]
mode gridcode
[gridcode]
k_pos 2.0
k_neg 2.0
deadband_pu 0.0
iq_total_max_pu 1.0
i_total_max_pu 1.0
positive_priority true
id_request_pu 0.9
)";
    Scenario s = harness::parse_scenario(text);
    CHECK(s.mode == harness::CurrentMode::GRIDCODE);
    CHECK(s.gc.k_pos == doctest::Approx(2.0));
    CHECK(s.gc_id_request_pu == doctest::Approx(0.9));
}

TEST_CASE("grid frequency breakpoints build a ramp") {
    const char* text = R"(schema_version 1
[grid_frequency]
point 0.0 314.1592653589793
point 0.5 314.1592653589793
point 1.0 313.5
)";
    Scenario s = harness::parse_scenario(text);
    CHECK(s.omega_g.value(0.25) == doctest::Approx(2 * pi * 50));
    CHECK(s.omega_g.value(0.75) == doctest::Approx((314.1592653589793 + 313.5) / 2));
    CHECK(s.omega_g.value(2.0) == doctest::Approx(313.5));
}

TEST_CASE("parameter registry applies values and rejects unknown paths") {
    Scenario s = harness::parse_scenario("schema_version 1\n");

    harness::apply_parameter(s, "fault.zf_pu", 0.25);
    CHECK(s.fault.zf_pu == doctest::Approx(0.25));
    harness::apply_parameter(s, "rom.kp", 0.05);
    CHECK(s.params.rom.kp == doctest::Approx(0.05));
    harness::apply_parameter(s, "gridcode.i_total_max_pu", 1.2);
    CHECK(s.gc.i_total_max == doctest::Approx(1.2));

    CHECK_THROWS_AS(harness::apply_parameter(s, "rom.nope", 1.0), UnknownParameter);
    // applying a value that breaks an invariant revalidates
    CHECK_THROWS_AS(harness::apply_parameter(s, "fault.zf_pu", -1.0), ValidationError);

    auto paths = harness::parameter_paths();
    CHECK(paths.size() >= 30);
    bool found = false;
    for (const auto& p : paths) found = found || p == "notch.center_radps";
    CHECK(found);
}

TEST_CASE("content hash is stable and byte-sensitive") {
    Scenario a = harness::parse_scenario("schema_version 1\n");
    Scenario b = harness::parse_scenario("schema_version 1\n");
    Scenario c = harness::parse_scenario("schema_version 1\n# tweak\n");
    CHECK(a.content_hash == b.content_hash);
    CHECK(a.content_hash != c.content_hash);
    // FNV-1a of the empty string is the offset basis
    CHECK(harness::fnv1a("", 0) == 14695981039346656037ull);
}
