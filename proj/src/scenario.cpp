#include "wtrom/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wtrom::harness {

uint64_t fnv1a(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 14695981039346656037ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

double parse_number(const std::string& tok, int line, const std::string& key) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError("value '" + tok + "' for " + key + " is not a number",
                         line, key);
    }
    if (used != tok.size())
        throw ParseError("trailing characters in value '" + tok + "' for " + key,
                         line, key);
    return v;
}

bool parse_bool(const std::string& tok, int line, const std::string& key) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    throw ParseError("value '" + tok + "' for " + key + " must be true or false",
                     line, key);
}

FaultKind parse_kind(const std::string& tok, int line) {
    if (tok == "slg") return FaultKind::SLG_A;
    if (tok == "dlg") return FaultKind::DLG_BC;
    if (tok == "dl") return FaultKind::DL_BC;
    if (tok == "bal3ph") return FaultKind::BALANCED_3PH;
    throw ParseError("fault kind '" + tok + "' is not one of slg, dlg, dl, bal3ph",
                     line, "kind");
}

struct ParseFlags {
    bool zg2_seen = false, zg0_seen = false;
    bool zf_pu_seen = false, zf_ohm_seen = false;
    double zf_ohm = 0.0;
    bool center_seen = false;
    bool omega_const_seen = false;
    double omega_const = 0.0;
    bool schema_seen = false;
};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    Scenario s;
    s.content_hash = fnv1a(text.data(), text.size());
    ParseFlags f;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string key;
        if (!(ls >> key)) continue;

        if (key.front() == '[') {
            if (key.back() != ']')
                throw ParseError("malformed section header '" + key + "'", line_no);
            section = key.substr(1, key.size() - 2);
            static const char* known[] = {"base",     "network",        "rom",
                                          "notch",    "cc",             "currents",
                                          "gridcode", "fault",          "solver",
                                          "grid_frequency", "scenario"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) throw ParseError("unknown section [" + section + "]", line_no);
            continue;
        }

        std::string tok;
        if (!(ls >> tok))
            throw ParseError("key '" + key + "' has no value", line_no, key);
        auto num = [&] { return parse_number(tok, line_no, key); };
        auto boolean = [&] { return parse_bool(tok, line_no, key); };
        auto unknown = [&]() -> double {
            throw ParseError("unknown key '" + key + "' in section [" + section + "]",
                             line_no, key);
        };

        if (section.empty()) {
            if (key == "schema_version") {
                s.schema_version = static_cast<int>(num());
                f.schema_seen = true;
            } else {
                throw ParseError("key '" + key + "' before any section", line_no, key);
            }
        } else if (section == "base") {
            if (key == "s_base_va") s.base.s_base_va = num();
            else if (key == "v_base_ll_v") s.base.v_base_ll_v = num();
            else if (key == "f0_hz") s.base.f0_hz = num();
            else unknown();
        } else if (section == "network") {
            if (key == "zg1_r_pu") s.z.zg1.r_pu = num();
            else if (key == "zg1_l_pu") s.z.zg1.l_pu = num();
            else if (key == "zg2_r_pu") { s.z.zg2.r_pu = num(); f.zg2_seen = true; }
            else if (key == "zg2_l_pu") { s.z.zg2.l_pu = num(); f.zg2_seen = true; }
            else if (key == "zg0_r_pu") { s.z.zg0.r_pu = num(); f.zg0_seen = true; }
            else if (key == "zg0_l_pu") { s.z.zg0.l_pu = num(); f.zg0_seen = true; }
            else if (key == "zc_r_pu") s.zc.r_pu = num();
            else if (key == "zc_l_pu") s.zc.l_pu = num();
            else unknown();
        } else if (section == "rom") {
            if (key == "kp") s.params.rom.kp = num();
            else if (key == "ki") s.params.rom.ki = num();
            else if (key == "lg_pu") s.params.rom.lg = num();
            else if (key == "r_lg_pu") s.params.rom.r_lg = num();
            else unknown();
        } else if (section == "notch") {
            if (key == "enabled") s.params.notch.enabled = boolean();
            else if (key == "zeta") s.params.notch.zeta = num();
            else if (key == "center_radps") {
                s.params.notch.omega_n_radps = num();
                f.center_seen = true;
            } else unknown();
        } else if (section == "cc") {
            if (key == "tau_s") s.params.cc_tau_s = num();
            else unknown();
        } else if (section == "currents") {
            if (key == "mode") {
                if (tok == "explicit") s.mode = CurrentMode::EXPLICIT;
                else if (tok == "gridcode") s.mode = CurrentMode::GRIDCODE;
                else
                    throw ParseError("mode '" + tok + "' must be explicit or gridcode",
                                     line_no, key);
            }
            else if (key == "pre_id_pu") s.currents.pre_id_pu = num();
            else if (key == "pre_iq_pu") s.currents.pre_iq_pu = num();
            else if (key == "pre_iqneg_pu") s.currents.pre_iqneg_pu = num();
            else if (key == "fault_id_pu") s.currents.fault_id_pu = num();
            else if (key == "fault_iq_pu") s.currents.fault_iq_pu = num();
            else if (key == "fault_iqneg_pu") s.currents.fault_iqneg_pu = num();
            else if (key == "recovery_ramp_pups") s.currents.recovery_ramp_pups = num();
            else unknown();
        } else if (section == "gridcode") {
            if (key == "k_pos") s.gc.k_pos = num();
            else if (key == "k_neg") s.gc.k_neg = num();
            else if (key == "deadband_pu") s.gc.deadband_pu = num();
            else if (key == "iq_total_max_pu") s.gc.iq_total_max = num();
            else if (key == "i_total_max_pu") s.gc.i_total_max = num();
            else if (key == "positive_priority") s.gc.positive_priority = boolean();
            else if (key == "id_post_ramp_pups") s.gc.id_post_ramp_pups = num();
            else if (key == "id_request_pu") s.gc_id_request_pu = num();
            else unknown();
        } else if (section == "fault") {
            if (key == "kind") s.fault.kind = parse_kind(tok, line_no);
            else if (key == "zf_pu") { s.fault.zf_pu = num(); f.zf_pu_seen = true; }
            else if (key == "zf_ohm") { f.zf_ohm = num(); f.zf_ohm_seen = true; }
            else if (key == "t_on_s") s.fault.t_on_s = num();
            else if (key == "t_clear_s") s.fault.t_clear_s = num();
            else if (key == "cleared") s.fault.cleared = boolean();
            else unknown();
        } else if (section == "grid_frequency") {
            if (key == "constant_radps") {
                f.omega_const = num();
                f.omega_const_seen = true;
            } else if (key == "point") {
                const double t = num();
                std::string tok2;
                if (!(ls >> tok2))
                    throw ParseError("point needs '<t_s> <value_radps>'", line_no, key);
                s.omega_g.add(t, parse_number(tok2, line_no, key));
            } else unknown();
        } else if (section == "solver") {
            if (key == "dt_s") s.solver.dt_s = num();
            else if (key == "out_dt_s") s.solver.out_dt_s = num();
            else if (key == "divergence_limit_radps")
                s.solver.divergence_limit_radps = num();
            else unknown();
        } else if (section == "scenario") {
            if (key == "t_end_s") s.t_end_s = num();
            else if (key == "vg_mag_pu") s.vg_mag_pu = num();
            else if (key == "label") s.label = tok;
            else unknown();
        }

        std::string extra;
        if (ls >> extra)
            throw ParseError("unexpected trailing token '" + extra + "'", line_no, key);
    }

    if (!f.schema_seen)
        throw ParseError("missing schema_version in " + origin, 0, "schema_version");

    // derived defaults
    s.params.rom.omega0_radps = s.base.omega0_radps();
    if (!f.center_seen)
        s.params.notch.omega_n_radps = 2.0 * s.base.omega0_radps();
    if (!f.zg2_seen) {
        s.z.zg2 = s.z.zg1;
        s.notices.push_back("zg2 not given, defaulted to zg1");
    }
    if (!f.zg0_seen) {
        s.z.zg0 = s.z.zg1;
        s.notices.push_back("zg0 not given, defaulted to zg1");
    }
    if (f.zf_pu_seen && f.zf_ohm_seen)
        throw ValidationError("fault impedance given both in ohm and pu",
                              "fault_impedance_once");
    if (f.zf_ohm_seen)
        s.fault.zf_pu = to_pu_impedance(f.zf_ohm, "ohm", s.base);
    if (f.omega_const_seen) {
        if (!s.omega_g.t.empty())
            throw ValidationError("grid frequency given both as constant and points",
                                  "grid_frequency_once");
        s.omega_g = PiecewiseLinearSignal::constant(f.omega_const);
    }
    if (s.omega_g.t.empty())
        s.omega_g = PiecewiseLinearSignal::constant(s.base.omega0_radps());

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

void validate_scenario(Scenario& s) {
    auto require = [](bool ok, const std::string& msg, const char* inv) {
        if (!ok) throw ValidationError(msg, inv);
    };

    require(s.schema_version == 1, "unsupported schema_version", "schema_version");
    require(s.base.s_base_va > 0 && s.base.v_base_ll_v > 0 && s.base.f0_hz > 0,
            "base quantities must be positive", "base_positive");
    for (const auto* b : {&s.z.zg1, &s.z.zg2, &s.z.zg0, &s.zc})
        require(b->r_pu >= 0 && b->l_pu >= 0,
                "branch impedances must be non-negative", "branch_sign");
    require(s.vg_mag_pu > 0, "source magnitude must be positive", "source_positive");

    require(s.params.rom.kp > 0 && s.params.rom.ki > 0,
            "loop gains must be positive", "gains_positive");
    require(s.params.rom.lg > 0 && s.params.rom.r_lg >= 0,
            "grid branch constants must be lg > 0, r_lg >= 0", "branch_constants");
    require(s.params.notch.zeta > 0 && s.params.notch.zeta <= 1.0,
            "notch damping must be in (0, 1]", "notch_zeta");
    require(s.params.notch.omega_n_radps > 0, "notch center must be positive",
            "notch_center");
    require(s.params.notch.omega_n_radps * s.solver.dt_s < pi,
            "notch center at or above the Nyquist rate", "notch_nyquist");
    require(s.params.cc_tau_s >= 0, "current lag must be non-negative", "cc_tau");

    require(s.fault.zf_pu >= 0, "fault impedance must be non-negative", "zf_sign");
    require(s.fault.t_on_s >= 0, "fault must start at or after zero", "fault_window");
    if (s.fault.cleared)
        require(s.fault.t_clear_s > s.fault.t_on_s,
                "fault must clear after it starts", "fault_window");
    require(s.t_end_s > s.fault.t_on_s, "horizon must extend past the fault start",
            "horizon");

    require(s.solver.dt_s > 0, "step size must be positive", "solver_config");
    require(s.solver.out_dt_s >= s.solver.dt_s,
            "output decimation must not be finer than the step", "solver_config");
    require(s.solver.divergence_limit_radps > 0,
            "divergence limit must be positive", "solver_config");

    if (s.mode == CurrentMode::EXPLICIT) {
        require(s.currents.recovery_ramp_pups > 0,
                "recovery ramp must be positive (inf steps)", "recovery_ramp");
    } else {
        for (auto& w : gridcode::validate(s.gc)) s.notices.push_back(std::move(w));
        require(s.gc_id_request_pu >= 0, "active current demand must be non-negative",
                "id_request");
    }

    for (double w : s.omega_g.v)
        require(w > 0, "grid frequency must stay positive", "grid_frequency");
}

namespace {

using Setter = std::function<void(Scenario&, double)>;

const std::map<std::string, Setter>& registry() {
    static const std::map<std::string, Setter> reg = {
        {"rom.kp", [](Scenario& s, double v) { s.params.rom.kp = v; }},
        {"rom.ki", [](Scenario& s, double v) { s.params.rom.ki = v; }},
        {"rom.lg_pu", [](Scenario& s, double v) { s.params.rom.lg = v; }},
        {"rom.r_lg_pu", [](Scenario& s, double v) { s.params.rom.r_lg = v; }},
        {"notch.zeta", [](Scenario& s, double v) { s.params.notch.zeta = v; }},
        {"notch.center_radps",
         [](Scenario& s, double v) { s.params.notch.omega_n_radps = v; }},
        {"cc.tau_s", [](Scenario& s, double v) { s.params.cc_tau_s = v; }},
        {"network.zg1_r_pu", [](Scenario& s, double v) { s.z.zg1.r_pu = v; }},
        {"network.zg1_l_pu", [](Scenario& s, double v) { s.z.zg1.l_pu = v; }},
        {"network.zg2_r_pu", [](Scenario& s, double v) { s.z.zg2.r_pu = v; }},
        {"network.zg2_l_pu", [](Scenario& s, double v) { s.z.zg2.l_pu = v; }},
        {"network.zg0_r_pu", [](Scenario& s, double v) { s.z.zg0.r_pu = v; }},
        {"network.zg0_l_pu", [](Scenario& s, double v) { s.z.zg0.l_pu = v; }},
        {"fault.zf_pu", [](Scenario& s, double v) { s.fault.zf_pu = v; }},
        {"fault.t_on_s", [](Scenario& s, double v) { s.fault.t_on_s = v; }},
        {"fault.t_clear_s", [](Scenario& s, double v) { s.fault.t_clear_s = v; }},
        {"currents.pre_id_pu", [](Scenario& s, double v) { s.currents.pre_id_pu = v; }},
        {"currents.pre_iq_pu", [](Scenario& s, double v) { s.currents.pre_iq_pu = v; }},
        {"currents.pre_iqneg_pu",
         [](Scenario& s, double v) { s.currents.pre_iqneg_pu = v; }},
        {"currents.fault_id_pu",
         [](Scenario& s, double v) { s.currents.fault_id_pu = v; }},
        {"currents.fault_iq_pu",
         [](Scenario& s, double v) { s.currents.fault_iq_pu = v; }},
        {"currents.fault_iqneg_pu",
         [](Scenario& s, double v) { s.currents.fault_iqneg_pu = v; }},
        {"currents.recovery_ramp_pups",
         [](Scenario& s, double v) { s.currents.recovery_ramp_pups = v; }},
        {"gridcode.k_pos", [](Scenario& s, double v) { s.gc.k_pos = v; }},
        {"gridcode.k_neg", [](Scenario& s, double v) { s.gc.k_neg = v; }},
        {"gridcode.deadband_pu", [](Scenario& s, double v) { s.gc.deadband_pu = v; }},
        {"gridcode.iq_total_max_pu",
         [](Scenario& s, double v) { s.gc.iq_total_max = v; }},
        {"gridcode.i_total_max_pu",
         [](Scenario& s, double v) { s.gc.i_total_max = v; }},
        {"gridcode.id_post_ramp_pups",
         [](Scenario& s, double v) { s.gc.id_post_ramp_pups = v; }},
        {"gridcode.id_request_pu",
         [](Scenario& s, double v) { s.gc_id_request_pu = v; }},
        {"scenario.t_end_s", [](Scenario& s, double v) { s.t_end_s = v; }},
        {"scenario.vg_mag_pu", [](Scenario& s, double v) { s.vg_mag_pu = v; }},
        {"solver.dt_s", [](Scenario& s, double v) { s.solver.dt_s = v; }},
        {"solver.out_dt_s", [](Scenario& s, double v) { s.solver.out_dt_s = v; }},
        {"solver.divergence_limit_radps",
         [](Scenario& s, double v) { s.solver.divergence_limit_radps = v; }},
    };
    return reg;
}

}  // namespace

std::vector<std::string> parameter_paths() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

void apply_parameter(Scenario& s, const std::string& path, double value) {
    auto it = registry().find(path);
    if (it == registry().end())
        throw UnknownParameter("no sweepable parameter named '" + path + "'");
    it->second(s, value);
    validate_scenario(s);
}

}  // namespace wtrom::harness
