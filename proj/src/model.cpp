#include "epj/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "epj/csv.hpp"

namespace epj {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Minimal INI reader: [section] headers, key = value pairs, '#' and ';'
/// comments. Duplicate keys are rejected.
std::map<std::string, std::map<std::string, std::string>>
parse_ini(std::string_view text) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty section name");
            sections[current];
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (current.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key '" + key + "' outside any section");
        auto [it, inserted] = sections[current].emplace(key, value);
        (void)it;
        if (!inserted)
            throw ConfigError("duplicate key " + current + "." + key);
    }
    return sections;
}

class ConfigView {
public:
    explicit ConfigView(std::string_view text) : sections_(parse_ini(text)) {}

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    double number(const std::string& section, const std::string& key) const {
        const std::string& raw = fetch(section, key);
        const char* begin = raw.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw ConfigError("key " + section + "." + key +
                              ": not a number: '" + raw + "'");
        return v;
    }

    double number_or(const std::string& section, const std::string& key,
                     double fallback) const {
        return has(section, key) ? number(section, key) : fallback;
    }

    bool boolean_or(const std::string& section, const std::string& key,
                    bool fallback) const {
        if (!has(section, key)) return fallback;
        std::string raw = fetch(section, key);
        std::transform(raw.begin(), raw.end(), raw.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
        if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
        throw ConfigError("key " + section + "." + key +
                          ": not a boolean: '" + raw + "'");
    }

private:
    const std::string& fetch(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end() || s->second.count(key) == 0)
            throw ConfigError("missing key " + section + "." + key);
        return s->second.at(key);
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string(field) + " must be strictly positive");
}

void require_nonnegative(double v, const char* field) {
    if (v < 0.0 || !std::isfinite(v))
        throw ConfigError(std::string(field) + " must be non-negative");
}

/// Derive arms and about-O inertias from the anchor layout at the current
/// joint position (parallel-axis rule for the inertias).
void derive_from_geometry(Scenario& s) {
    const BodyGeometry& g = *s.geometry;
    const double ox = s.joint_design.joint_x;
    const double oy = s.joint_design.joint_y;
    s.joint_design.l_oc = std::hypot(g.anchor_c.x - ox, g.anchor_c.y - oy);
    s.joint_design.l_od = std::hypot(g.anchor_d.x - ox, g.anchor_d.y - oy);
    const double da2 = (g.com_a.x - ox) * (g.com_a.x - ox) +
                       (g.com_a.y - oy) * (g.com_a.y - oy);
    const double db2 = (g.com_b.x - ox) * (g.com_b.x - ox) +
                       (g.com_b.y - oy) * (g.com_b.y - oy);
    s.mass_properties.inertia_a = g.inertia_a_com + s.mass_properties.mass_a * da2;
    s.mass_properties.inertia_b = g.inertia_b_com + s.mass_properties.mass_b * db2;
}

void validate(const Scenario& s) {
    require_positive(s.mass_properties.mass_a, "masses.leg_g");
    require_positive(s.mass_properties.mass_b, "masses.body_g");
    require_positive(s.mass_properties.inertia_a, "inertia of mechanism A");
    require_positive(s.mass_properties.inertia_b, "inertia of mechanism B");
    require_positive(s.joint_design.l_oc, "joint.l_oc_mm");
    require_positive(s.joint_design.l_od, "joint.l_od_mm");
    require_nonnegative(s.joint_design.stiffness_k, "joint.k_n_per_m");
    require_nonnegative(s.joint_design.natural_length_l0, "joint.l0_mm");
    if (!(s.joint_design.latch_angle_phi0 > 0.0 &&
          s.joint_design.latch_angle_phi0 < kPi))
        throw ConfigError("joint.phi0_deg must lie strictly between 0 and 180");
    require_positive(s.settings.dt, "sim.dt");
    require_positive(s.settings.t_max, "sim.t_max");
    require_positive(s.settings.event_tol, "sim.event_tol");
    require_positive(s.settings.gravity_g, "sim.g");
    require_positive(s.settings.omega_zero_tol, "sim.omega_zero_tol");
    if (!(s.launch.com_velocity.y > 0.0))
        throw ConfigError("launch.vy_m_s must be strictly positive");
    if (s.epj_enabled) {
        if (!(s.launch.phi0_open > s.joint_design.latch_angle_phi0))
            throw ConfigError("joint.phi_open_deg must exceed joint.phi0_deg "
                              "(joint open at take-off)");
        if (!(s.launch.phi0_open <= kPi))
            throw ConfigError("joint.phi_open_deg must not exceed 180");
    }
}

constexpr const char* kReferenceConfig = R"(# Calibrated reference scenario for the latch-spring jumper.
# Masses are the prototype's; the joint sits at the non-flipping design
# point found by the stiffness and joint-position studies.

[masses]
leg_g = 33.46
body_g = 118.8
total_g = 152.26
com_a_x_mm = 29.01
com_a_y_mm = 5.04
com_b_x_mm = 74.8
com_b_y_mm = 38.0
j_a_com = 1.2e-07
j_b_com = 0.00012

[joint]
x_mm = 30.35
y_mm = 3.7
c_x_mm = 22.83
c_y_mm = 0.96
d_x_mm = 38.81
d_y_mm = 6.78
l0_mm = 16.43
k_n_per_m = 1566
phi0_deg = 150
phi_open_deg = 157
tension_only = false

[launch]
vx_m_s = 2.2937790001325924
vy_m_s = 3.1220531705914301
omega_a = 29.99
omega_b = -0.02
rigid_omega = -3.46

[sim]
dt = 1e-05
t_max = 2
event_tol = 1e-09
g = 9.81
omega_zero_tol = 0.0001
)";

} // namespace

const char* to_string(LatchMode mode) {
    switch (mode) {
        case LatchMode::Locked: return "Locked";
        case LatchMode::Open: return "Open";
        case LatchMode::Relocked: return "Relocked";
    }
    return "?";
}

Vec2 Scenario::robot_com() const {
    if (!geometry) return {0.0, 0.0};
    const double m = mass_properties.mass_a + mass_properties.mass_b;
    return {(mass_properties.mass_a * geometry->com_a.x +
             mass_properties.mass_b * geometry->com_b.x) / m,
            (mass_properties.mass_a * geometry->com_a.y +
             mass_properties.mass_b * geometry->com_b.y) / m};
}

Scenario load_scenario(std::string_view config_text) {
    ConfigView cfg(config_text);
    Scenario s;

    s.mass_properties.mass_a = cfg.number("masses", "leg_g") / 1000.0;
    s.mass_properties.mass_b = cfg.number("masses", "body_g") / 1000.0;
    if (cfg.has("masses", "total_g")) {
        double total = cfg.number("masses", "total_g") / 1000.0;
        if (std::abs(s.mass_properties.mass_a + s.mass_properties.mass_b - total) > 1e-9)
            throw ConfigError("masses.total_g: leg_g + body_g differs from the "
                              "configured total by more than 1e-9 kg");
    }

    s.joint_design.joint_x = cfg.number("joint", "x_mm") / 1000.0;
    s.joint_design.joint_y = cfg.number("joint", "y_mm") / 1000.0;
    s.joint_design.natural_length_l0 = cfg.number("joint", "l0_mm") / 1000.0;
    s.joint_design.stiffness_k = cfg.number("joint", "k_n_per_m");
    s.joint_design.latch_angle_phi0 = cfg.number("joint", "phi0_deg") * kDegToRad;
    s.joint_design.tension_only = cfg.boolean_or("joint", "tension_only", false);
    s.epj_enabled = cfg.boolean_or("joint", "epj_enabled", true);

    const bool has_anchors = cfg.has("joint", "c_x_mm") || cfg.has("joint", "c_y_mm") ||
                             cfg.has("joint", "d_x_mm") || cfg.has("joint", "d_y_mm");
    const bool has_arms = cfg.has("joint", "l_oc_mm") || cfg.has("joint", "l_od_mm");
    if (has_anchors && has_arms)
        throw ConfigError("joint: give either anchor coordinates (c_*_mm, d_*_mm) "
                          "or direct arms (l_oc_mm, l_od_mm), not both");
    if (has_anchors) {
        BodyGeometry g;
        g.anchor_c = {cfg.number("joint", "c_x_mm") / 1000.0,
                      cfg.number("joint", "c_y_mm") / 1000.0};
        g.anchor_d = {cfg.number("joint", "d_x_mm") / 1000.0,
                      cfg.number("joint", "d_y_mm") / 1000.0};
        g.com_a = {cfg.number("masses", "com_a_x_mm") / 1000.0,
                   cfg.number("masses", "com_a_y_mm") / 1000.0};
        g.com_b = {cfg.number("masses", "com_b_x_mm") / 1000.0,
                   cfg.number("masses", "com_b_y_mm") / 1000.0};
        g.inertia_a_com = cfg.number("masses", "j_a_com");
        g.inertia_b_com = cfg.number("masses", "j_b_com");
        require_nonnegative(g.inertia_a_com, "masses.j_a_com");
        require_nonnegative(g.inertia_b_com, "masses.j_b_com");
        s.geometry = g;
        derive_from_geometry(s);
    } else {
        s.joint_design.l_oc = cfg.number("joint", "l_oc_mm") / 1000.0;
        s.joint_design.l_od = cfg.number("joint", "l_od_mm") / 1000.0;
        s.mass_properties.inertia_a = cfg.number("masses", "j_a");
        s.mass_properties.inertia_b = cfg.number("masses", "j_b");
    }

    s.launch.t0 = cfg.number_or("launch", "t0_s", 0.0);
    s.launch.com_position = {cfg.number_or("launch", "x0_m", 0.0),
                             cfg.number_or("launch", "y0_m", 0.0)};
    s.launch.com_velocity = {cfg.number("launch", "vx_m_s"),
                             cfg.number("launch", "vy_m_s")};
    s.launch.theta_a0 = cfg.number_or("launch", "theta_a0", 0.0);
    s.launch.theta_b0 = cfg.number_or("launch", "theta_b0", 0.0);
    s.launch.omega_a0 = cfg.number("launch", "omega_a");
    s.launch.omega_b0 = cfg.number("launch", "omega_b");
    s.launch.phi0_open = cfg.number("joint", "phi_open_deg") * kDegToRad;
    s.rigid_omega = cfg.number("launch", "rigid_omega");

    s.settings.dt = cfg.number_or("sim", "dt", 1e-5);
    s.settings.t_max = cfg.number_or("sim", "t_max", 2.0);
    s.settings.event_tol = cfg.number_or("sim", "event_tol", 1e-9);
    s.settings.gravity_g = cfg.number_or("sim", "g", 9.81);
    s.settings.omega_zero_tol = cfg.number_or("sim", "omega_zero_tol", 1e-4);

    validate(s);
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string scenario_to_config_text(const Scenario& s) {
    std::ostringstream out;
    auto g17 = [](double v) { return format_g17(v); };
    out << "[masses]\n";
    out << "leg_g = " << g17(s.mass_properties.mass_a * 1000.0) << "\n";
    out << "body_g = " << g17(s.mass_properties.mass_b * 1000.0) << "\n";
    if (s.geometry) {
        out << "com_a_x_mm = " << g17(s.geometry->com_a.x * 1000.0) << "\n";
        out << "com_a_y_mm = " << g17(s.geometry->com_a.y * 1000.0) << "\n";
        out << "com_b_x_mm = " << g17(s.geometry->com_b.x * 1000.0) << "\n";
        out << "com_b_y_mm = " << g17(s.geometry->com_b.y * 1000.0) << "\n";
        out << "j_a_com = " << g17(s.geometry->inertia_a_com) << "\n";
        out << "j_b_com = " << g17(s.geometry->inertia_b_com) << "\n";
    } else {
        out << "j_a = " << g17(s.mass_properties.inertia_a) << "\n";
        out << "j_b = " << g17(s.mass_properties.inertia_b) << "\n";
    }
    out << "\n[joint]\n";
    out << "epj_enabled = " << (s.epj_enabled ? "true" : "false") << "\n";
    out << "x_mm = " << g17(s.joint_design.joint_x * 1000.0) << "\n";
    out << "y_mm = " << g17(s.joint_design.joint_y * 1000.0) << "\n";
    if (s.geometry) {
        out << "c_x_mm = " << g17(s.geometry->anchor_c.x * 1000.0) << "\n";
        out << "c_y_mm = " << g17(s.geometry->anchor_c.y * 1000.0) << "\n";
        out << "d_x_mm = " << g17(s.geometry->anchor_d.x * 1000.0) << "\n";
        out << "d_y_mm = " << g17(s.geometry->anchor_d.y * 1000.0) << "\n";
    } else {
        out << "l_oc_mm = " << g17(s.joint_design.l_oc * 1000.0) << "\n";
        out << "l_od_mm = " << g17(s.joint_design.l_od * 1000.0) << "\n";
    }
    out << "l0_mm = " << g17(s.joint_design.natural_length_l0 * 1000.0) << "\n";
    out << "k_n_per_m = " << g17(s.joint_design.stiffness_k) << "\n";
    out << "phi0_deg = " << g17(s.joint_design.latch_angle_phi0 / kDegToRad) << "\n";
    out << "phi_open_deg = " << g17(s.launch.phi0_open / kDegToRad) << "\n";
    out << "tension_only = " << (s.joint_design.tension_only ? "true" : "false") << "\n";
    out << "\n[launch]\n";
    out << "t0_s = " << g17(s.launch.t0) << "\n";
    out << "x0_m = " << g17(s.launch.com_position.x) << "\n";
    out << "y0_m = " << g17(s.launch.com_position.y) << "\n";
    out << "vx_m_s = " << g17(s.launch.com_velocity.x) << "\n";
    out << "vy_m_s = " << g17(s.launch.com_velocity.y) << "\n";
    out << "theta_a0 = " << g17(s.launch.theta_a0) << "\n";
    out << "theta_b0 = " << g17(s.launch.theta_b0) << "\n";
    out << "omega_a = " << g17(s.launch.omega_a0) << "\n";
    out << "omega_b = " << g17(s.launch.omega_b0) << "\n";
    out << "rigid_omega = " << g17(s.rigid_omega) << "\n";
    out << "\n[sim]\n";
    out << "dt = " << g17(s.settings.dt) << "\n";
    out << "t_max = " << g17(s.settings.t_max) << "\n";
    out << "event_tol = " << g17(s.settings.event_tol) << "\n";
    out << "g = " << g17(s.settings.gravity_g) << "\n";
    out << "omega_zero_tol = " << g17(s.settings.omega_zero_tol) << "\n";
    return out.str();
}

Scenario default_reference_scenario() {
    return load_scenario(kReferenceConfig);
}

Scenario with_joint_position(const Scenario& base, double x_m, double y_m) {
    if (!base.geometry)
        throw ConfigError("joint-position changes require anchor geometry "
                          "(c_*_mm / d_*_mm and segment CoM keys)");
    Scenario s = base;
    s.joint_design.joint_x = x_m;
    s.joint_design.joint_y = y_m;
    derive_from_geometry(s);
    validate(s);
    return s;
}

Scenario with_stiffness(const Scenario& base, double k_n_per_m) {
    Scenario s = base;
    s.joint_design.stiffness_k = k_n_per_m;
    validate(s);
    return s;
}

} // namespace epj
