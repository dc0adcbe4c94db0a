#include "epj/flight_kinematics.hpp"

#include <cmath>

#include "epj/csv.hpp"
#include "epj/spring_joint.hpp"

namespace epj {

namespace {

void check_ascending(const LaunchState& launch) {
    if (!(launch.com_velocity.y > 0.0))
        throw ConfigError("launch vertical speed must be strictly positive");
}

} // namespace

BallisticState ballistic_state(const LaunchState& launch, double g, double t) {
    BallisticState s;
    s.t = launch.t0 + t;
    s.x = launch.com_position.x + launch.com_velocity.x * t;
    s.y = launch.com_position.y + launch.com_velocity.y * t - 0.5 * g * t * t;
    s.vx = launch.com_velocity.x;
    s.vy = launch.com_velocity.y - g * t;
    return s;
}

double apex_height(const LaunchState& launch, double g) {
    check_ascending(launch);
    const double vy = launch.com_velocity.y;
    return launch.com_position.y + vy * vy / (2.0 * g);
}

double landing_distance(const LaunchState& launch, double g) {
    check_ascending(launch);
    return 2.0 * launch.com_velocity.x * launch.com_velocity.y / g;
}

double flight_duration(const LaunchState& launch, double g) {
    check_ascending(launch);
    return 2.0 * launch.com_velocity.y / g;
}

double spring_preload_energy(const Scenario& scenario) {
    return spring_energy(spring_geometry(scenario.joint_design),
                         scenario.launch.phi0_open);
}

LaunchState takeoff_energy_partition(const Scenario& scenario) {
    if (!scenario.epj_enabled)
        throw StateError("energy partition applies only to an enabled joint");
    const LaunchState& launch = scenario.launch;
    const double e_spring = spring_preload_energy(scenario);
    if (e_spring == 0.0) return launch;
    const double mass = scenario.mass_properties.mass_a + scenario.mass_properties.mass_b;
    const double v2 = launch.com_velocity.x * launch.com_velocity.x +
                      launch.com_velocity.y * launch.com_velocity.y;
    const double e_kinetic = 0.5 * mass * v2;
    if (e_spring >= e_kinetic)
        throw SimulationError("spring preload absorbs the entire launch kinetic "
                              "energy; the jump is infeasible");
    const double scale = std::sqrt(1.0 - e_spring / e_kinetic);
    LaunchState adjusted = launch;
    adjusted.com_velocity.x *= scale;
    adjusted.com_velocity.y *= scale;
    return adjusted;
}

double corrected_landing_distance(const Scenario& scenario,
                                  const LaunchState& adjusted_launch,
                                  double flip_angle) {
    const double range = landing_distance(adjusted_launch, scenario.settings.gravity_g);
    const Vec2 r = scenario.robot_com();
    return range + r.x * (1.0 - std::cos(flip_angle)) + r.y * std::sin(flip_angle);
}

std::string metrics_csv_header() {
    return "scenario_id,epj,k,joint_x_mm,joint_y_mm,omega_end,apex_m,distance_m,"
           "distance_corrected_m,flight_s,relock_s";
}

void write_metrics_row(std::ostream& out, const std::string& scenario_id,
                       bool epj, const Scenario& scenario,
                       const JumpMetrics& metrics) {
    out << scenario_id << ',' << (epj ? 1 : 0) << ','
        << format_g9(scenario.joint_design.stiffness_k) << ','
        << format_g9(scenario.joint_design.joint_x * 1000.0) << ','
        << format_g9(scenario.joint_design.joint_y * 1000.0) << ','
        << format_g9(metrics.omega_end) << ','
        << format_g9(metrics.apex_height) << ','
        << format_g9(metrics.landing_distance) << ','
        << format_g9(metrics.distance_corrected) << ','
        << format_g9(metrics.flight_time) << ',';
    if (metrics.relock_time) out << format_g9(*metrics.relock_time);
    out << '\n';
}

} // namespace epj
