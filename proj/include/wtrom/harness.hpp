#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wtrom/refmodel.hpp"
#include "wtrom/rom.hpp"
#include "wtrom/scenario.hpp"
#include "wtrom/trajectory.hpp"

namespace wtrom::harness {

enum class Model { ROM, REFMODEL, BOTH };

// Accepts "rom", "refmodel", "both".
Model parse_model(const std::string& name);

// Everything the two dynamic models need to play one scenario: the shared
// current schedules, the swing model's effective source magnitude with its
// event jumps, and the reference model's network segments.
//
// The swing model integrates its angle against the active segment's
// reference phasor (the source pre and post fault, the positive-sequence
// fault voltage at the scheduled fault currents during it). ref_angle_rad
// holds that phasor's angle per segment; adding it to the integrated angle
// reports both models in the same source frame.
struct Timeline {
    rom::RomState rom_init;
    rom::RomSignals rom_signals;
    std::vector<rom::RomEvent> rom_events;
    refmodel::RefModelInputs ref_inputs;
    std::vector<double> ref_angle_rad;  // one entry per ref_inputs.segments
    CurrentRefs pre_refs;               // resolved operating points
    CurrentRefs fault_refs;
};

// Resolves grid-code references to fixed points when the scenario asks for
// them; explicit schedules pass through. Reactive commands step at the
// fault edges, the active command ramps back at the recovery rate.
Timeline build_timeline(const Scenario& s);

struct ComparisonReport {
    double rmse_delta_rad = 0.0;
    double rmse_delta_dot_radps = 0.0;
    double peak_delta_error_rad = 0.0;
    // rmse_delta_dot over the reference trajectory's peak-to-peak delta_dot
    double normalized_rmse = 0.0;
    double window_start_s = 0.0;
    double window_end_s = 0.0;
    size_t samples = 0;
};

struct RunResult {
    Trajectory rom;       // model tag left empty when not requested
    Trajectory refmodel;
    std::optional<ComparisonReport> report;  // present for Model::BOTH
};

// Runs the selected model(s) over the scenario's event schedule. A
// divergence classification comes back on the trajectory, not as an error.
RunResult run(const Scenario& s, Model model);

// Reference samples are linearly interpolated onto the swing-model grid.
// The window never extends beyond either trajectory, and samples from an
// event instant through event_exclusion_s after it are dropped.
ComparisonReport compare_trajectories(const Trajectory& swing,
                                      const Trajectory& reference,
                                      double window_start_s,
                                      double event_exclusion_s = 2e-3);

// Post-event settling test: false when flagged diverged, otherwise true
// when |delta_dot| stays below the threshold over the trailing window.
bool classify_stable(const Trajectory& t, double window_s = 0.2,
                     double threshold_radps = 0.5);

struct SweepRow {
    double value = 0.0;
    bool stable = false;
    std::optional<double> cct_s;  // empty when no CCT was requested or bracketed
};

struct SweepOptions {
    Model model = Model::ROM;
    std::optional<std::pair<double, double>> cct_window;  // s
    double cct_tol_s = 1e-3;
    bool parallel = true;  // dispatch runs across a worker pool
};

// One run per value, rows in input order regardless of scheduling. A CCT
// window that fails to bracket the boundary leaves that row's cct_s empty.
std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter,
                            const std::vector<double>& values,
                            const SweepOptions& opt = {});

// Bisects fault.t_clear_s between a stable and an unstable endpoint.
// Model::BOTH falls back to the swing model; pass Model::REFMODEL to
// bisect on the reference model.
rom::BisectionResult critical_clearing_time(const Scenario& s, double window_lo_s,
                                            double window_hi_s, double tol_s,
                                            Model model = Model::ROM);

// Independent scenario runs; results land at their scenario's index
// whether dispatched to the pool or run in sequence.
std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios,
                                 Model model, bool parallel);

// CSV per the column contract: comment lines with the scenario hash,
// model, any divergence flag and the event markers, then the header and
// full-precision rows.
std::string format_trajectory_csv(const Trajectory& t);
void emit_trajectory_csv(const Trajectory& t, const std::string& path);
Trajectory parse_trajectory_csv(const std::string& text);
Trajectory read_trajectory_csv(const std::string& path);

std::string format_report_csv(const ComparisonReport& r);
std::string format_sweep_csv(const std::vector<SweepRow>& rows,
                             const std::string& parameter);

// Two stacked panels, angle and angle rate against time, event markers as
// vertical rules, one labeled polyline per trajectory (at most two).
std::string render_svg(const std::vector<const Trajectory*>& series);
void emit_svg(const std::vector<const Trajectory*>& series, const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace wtrom::harness
