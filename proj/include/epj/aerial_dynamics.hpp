#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "epj/flight_kinematics.hpp"
#include "epj/model.hpp"

namespace epj {

/// Rotational state of the hinged pair during flight.
///
/// Angle conventions: each mechanism's positive rotation direction is the
/// one the joint torque drives, so a single torque magnitude M accelerates
/// both and the joint angle obeys
///   phi = phi_open - (theta_a - theta_a0) - (theta_b - theta_b0).
/// theta_b doubles as the body's world orientation angle (negative rate =
/// forward flip); theta_a is the leg angle in its own sense and only feeds
/// the bookkeeping above.
struct AerialState {
    double t = 0.0;
    double theta_a = 0.0;
    double theta_b = 0.0;
    double omega_a = 0.0;
    double omega_b = 0.0;
    double phi = 0.0;
    LatchMode latch = LatchMode::Open;
};

struct RotationRates {
    double d_theta_a = 0.0;
    double d_theta_b = 0.0;
    double d_omega_a = 0.0;
    double d_omega_b = 0.0;
};

/// Latch-closure impact summary. Angular momentum J_A w_A + J_B w_B is
/// conserved exactly; kinetic energy never increases.
struct RelockEvent {
    double t_end = 0.0;
    double omega_a_before = 0.0;
    double omega_b_before = 0.0;
    double omega_end = 0.0;
    double energy_dissipated = 0.0;
};

struct AerialTrajectory {
    std::vector<AerialState> states;   ///< samples at the integrator step rate
    std::optional<RelockEvent> relock; ///< absent for the rigid baseline
    LaunchState adjusted_launch;       ///< launch actually flown (energy partition applied)
    double flight_time = 0.0;          ///< CoM landing time from t0 [s]
};

/// Eq.-of-motion right-hand side while the latch is open:
/// d(omega)/dt = M(phi)/J for both mechanisms. Throws StateError unless
/// latch == Open.
RotationRates rotational_derivatives(const AerialState& state, const Scenario& scenario);

/// One classical 4th-order step of (theta_a, theta_b, omega_a, omega_b);
/// phi is recomputed from the angle bookkeeping.
AerialState step_rk4(const AerialState& state, const Scenario& scenario, double dt);

/// If phi crosses the latch angle downward between the two samples,
/// returns the crossing time localized by bisection on sub-steps to
/// settings.event_tol in phi.
std::optional<double> detect_relock(const AerialState& prev, const AerialState& next,
                                    const Scenario& scenario);

/// Momentum-conserving closure impact:
/// omega_end = (J_A w_A + J_B w_B) / (J_A + J_B).
RelockEvent relock_impact(const AerialState& state, const MassProperties& masses);

/// Integrate the open joint from launch, apply the relock impact, then
/// coast rigidly at omega_end until the CoM lands. Throws SimulationError
/// (reporting the minimum phi reached) when the joint never closes.
AerialTrajectory simulate_aerial(const Scenario& scenario);

/// Rigid baseline: constant rigid_omega, no relock event.
AerialTrajectory simulate_rigid(const Scenario& scenario);

/// Rotational + elastic energy of a state (the conserved quantity of the
/// open phase for a bidirectional spring).
double total_energy(const AerialState& state, const Scenario& scenario);

/// Net body rotation accumulated between take-off and landing.
double landing_flip_angle(const Scenario& scenario, const AerialTrajectory& trajectory);

JumpMetrics jump_metrics(const Scenario& scenario, const AerialTrajectory& trajectory);

/// Columns: t,theta_a,theta_b,omega_a,omega_b,phi,latch,com_x,com_y,energy
/// with 9 significant digits.
void write_trajectory_csv(std::ostream& out, const Scenario& scenario,
                          const AerialTrajectory& trajectory);

} // namespace epj
