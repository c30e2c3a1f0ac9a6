#pragma once

#include <string>
#include <vector>

namespace wtrom {

struct EventMarker {
    double t_s = 0.0;
    std::string label;
};

// Columnar simulation record shared by both dynamic models. delta is the
// PLL angle minus the grid-source angle in radians; sequence-voltage
// columns hold the terminal values the model saw at each sample.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<double> delta_dot;
    std::vector<double> vf_pos_mag;
    std::vector<double> vf_pos_ang;
    std::vector<double> vf_neg_mag;
    std::vector<double> omega_g;

    std::vector<EventMarker> events;
    bool diverged = false;
    double t_diverged = 0.0;

    std::string model;          // "rom" or "refmodel"
    std::string scenario_hash;  // hex digest of the scenario file

    size_t size() const { return t.size(); }
};

}  // namespace wtrom
