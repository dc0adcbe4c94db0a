#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "epj/model.hpp"

namespace epj {

/// Closed-form projectile state of the robot CoM.
struct BallisticState {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
};

/// Outcome of one simulated jump.
struct JumpMetrics {
    double omega_end = 0.0;          ///< angular velocity after the latch closes [rad/s]
    double apex_height = 0.0;        ///< highest CoM altitude [m]
    double landing_distance = 0.0;   ///< CoM range back at launch height [m]
    double distance_corrected = 0.0; ///< range offset by the landing orientation [m]
    double flight_time = 0.0;        ///< [s]
    std::optional<double> relock_time; ///< absent for the rigid baseline
};

BallisticState ballistic_state(const LaunchState& launch, double g, double t);

/// y0 + vy0^2 / (2 g). Requires vy0 > 0.
double apex_height(const LaunchState& launch, double g);

/// Horizontal CoM displacement when the CoM returns to launch height:
/// 2 vx0 vy0 / g. Requires vy0 > 0.
double landing_distance(const LaunchState& launch, double g);

/// Time for the CoM to return to launch height: 2 vy0 / g.
double flight_duration(const LaunchState& launch, double g);

/// Elastic energy held by the open joint's spring at take-off.
double spring_preload_energy(const Scenario& scenario);

/// Launch state with the CoM speed rescaled so the kinetic energy drops
/// by the spring preload while the launch angle is preserved. Only
/// meaningful for an enabled joint; the rigid baseline is never adjusted.
/// Throws SimulationError when the spring would absorb the entire jump.
LaunchState takeoff_energy_partition(const Scenario& scenario);

/// Landing distance of the body reference point (body-frame origin) when
/// the robot has rotated by flip_angle over the flight: the CoM range plus
/// r_x (1 - cos) + r_y sin of the body-frame CoM offset. Reproduces the
/// orientation dependence of the measured jump distance without a contact
/// model. Falls back to the plain CoM range when no geometry is stored.
double corrected_landing_distance(const Scenario& scenario,
                                  const LaunchState& adjusted_launch,
                                  double flip_angle);

std::string metrics_csv_header();
void write_metrics_row(std::ostream& out, const std::string& scenario_id,
                       bool epj, const Scenario& scenario,
                       const JumpMetrics& metrics);

} // namespace epj
