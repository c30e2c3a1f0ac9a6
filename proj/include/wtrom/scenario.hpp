#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wtrom/gridcode.hpp"
#include "wtrom/refmodel.hpp"
#include "wtrom/rom.hpp"
#include "wtrom/signal.hpp"
#include "wtrom/types.hpp"

namespace wtrom::harness {

// Per-segment converter current commands. The recovery ramp applies to the
// active current after clearing; reactive commands step back immediately.
struct CurrentSchedule {
    double pre_id_pu = 1.0;
    double pre_iq_pu = 0.0;
    double pre_iqneg_pu = 0.0;
    double fault_id_pu = 0.0;
    double fault_iq_pu = 0.0;
    double fault_iqneg_pu = 0.0;
    double recovery_ramp_pups = std::numeric_limits<double>::infinity();
};

enum class CurrentMode { EXPLICIT, GRIDCODE };

struct Scenario {
    int schema_version = 1;
    std::string label = "unnamed";

    BaseQuantities base;
    SequenceImpedanceSet z;                    // grid branch per sequence
    SequenceImpedance zc{0.0, 0.0};            // converter-side series branch
    double vg_mag_pu = 1.0;

    refmodel::RefModelParams params;           // loop gains, notch, current lag

    CurrentMode mode = CurrentMode::EXPLICIT;
    CurrentSchedule currents;
    gridcode::GridCodeParams gc;
    double gc_id_request_pu = 1.0;

    FaultSpec fault;
    PiecewiseLinearSignal omega_g;             // rad/s; empty means nominal
    double t_end_s = 1.0;
    rom::SolverConfig solver;

    uint64_t content_hash = 0;                 // FNV-1a of the source bytes
    std::vector<std::string> notices;          // defaults applied, soft warnings
};

uint64_t fnv1a(const void* data, size_t n);

// Parses the sectioned key-value scenario schema. Unknown sections or keys
// raise ParseError with the offending line; violated invariants raise
// ValidationError naming the invariant. Applied defaults are recorded in
// notices.
Scenario load_scenario(const std::string& path);

// Same parser over an in-memory buffer; origin names the source in errors.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<buffer>");

// Re-checks every cross-field invariant; load_scenario and
// apply_parameter call this, direct mutation should too.
void validate_scenario(Scenario& s);

// Numeric parameter paths reachable by sweeps, e.g. "rom.kp" or
// "fault.zf_pu". apply_parameter sets one and revalidates.
std::vector<std::string> parameter_paths();
void apply_parameter(Scenario& s, const std::string& path, double value);

}  // namespace wtrom::harness
