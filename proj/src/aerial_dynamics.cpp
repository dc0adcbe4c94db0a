#include "epj/aerial_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "epj/csv.hpp"
#include "epj/spring_joint.hpp"

namespace epj {

namespace {

double phi_of(const Scenario& s, double theta_a, double theta_b) {
    return s.launch.phi0_open - (theta_a - s.launch.theta_a0) -
           (theta_b - s.launch.theta_b0);
}

struct Rhs {
    const Scenario& scenario;
    SpringGeometry spring;

    explicit Rhs(const Scenario& s)
        : scenario(s), spring(spring_geometry(s.joint_design)) {}

    RotationRates operator()(double theta_a, double theta_b, double omega_a,
                             double omega_b) const {
        const double torque =
            joint_torque_periodic(spring, phi_of(scenario, theta_a, theta_b));
        return {omega_a, omega_b,
                torque / scenario.mass_properties.inertia_a,
                torque / scenario.mass_properties.inertia_b};
    }
};

AerialState rk4_core(const Rhs& rhs, const AerialState& s, double dt) {
    const RotationRates k1 = rhs(s.theta_a, s.theta_b, s.omega_a, s.omega_b);
    const RotationRates k2 = rhs(s.theta_a + 0.5 * dt * k1.d_theta_a,
                                 s.theta_b + 0.5 * dt * k1.d_theta_b,
                                 s.omega_a + 0.5 * dt * k1.d_omega_a,
                                 s.omega_b + 0.5 * dt * k1.d_omega_b);
    const RotationRates k3 = rhs(s.theta_a + 0.5 * dt * k2.d_theta_a,
                                 s.theta_b + 0.5 * dt * k2.d_theta_b,
                                 s.omega_a + 0.5 * dt * k2.d_omega_a,
                                 s.omega_b + 0.5 * dt * k2.d_omega_b);
    const RotationRates k4 = rhs(s.theta_a + dt * k3.d_theta_a,
                                 s.theta_b + dt * k3.d_theta_b,
                                 s.omega_a + dt * k3.d_omega_a,
                                 s.omega_b + dt * k3.d_omega_b);
    AerialState out = s;
    out.t = s.t + dt;
    out.theta_a += dt / 6.0 * (k1.d_theta_a + 2.0 * (k2.d_theta_a + k3.d_theta_a) + k4.d_theta_a);
    out.theta_b += dt / 6.0 * (k1.d_theta_b + 2.0 * (k2.d_theta_b + k3.d_theta_b) + k4.d_theta_b);
    out.omega_a += dt / 6.0 * (k1.d_omega_a + 2.0 * (k2.d_omega_a + k3.d_omega_a) + k4.d_omega_a);
    out.omega_b += dt / 6.0 * (k1.d_omega_b + 2.0 * (k2.d_omega_b + k3.d_omega_b) + k4.d_omega_b);
    out.phi = phi_of(rhs.scenario, out.theta_a, out.theta_b);
    return out;
}

void check_finite(const AerialState& s) {
    const std::pair<const char*, double> fields[] = {
        {"theta_a", s.theta_a}, {"theta_b", s.theta_b},
        {"omega_a", s.omega_a}, {"omega_b", s.omega_b}, {"phi", s.phi}};
    for (const auto& [name, value] : fields)
        if (!std::isfinite(value))
            throw SimulationError(std::string("non-finite ") + name +
                                  " at t = " + format_g9(s.t));
}

/// Bisect the sub-step until |phi - phi0| <= event_tol. Returns the
/// localized pre-impact state, or nothing without a downward crossing.
std::optional<AerialState> locate_relock(const Rhs& rhs, const AerialState& prev,
                                         const AerialState& next) {
    const Scenario& sc = rhs.scenario;
    const double phi0 = sc.joint_design.latch_angle_phi0;
    if (!(prev.phi > phi0 && next.phi <= phi0)) return std::nullopt;
    const double span = next.t - prev.t;
    double lo = 0.0;
    double hi = span;
    AerialState candidate = next;
    for (int i = 0; i < 200; ++i) {
        if (std::abs(candidate.phi - phi0) <= sc.settings.event_tol) return candidate;
        const double mid = 0.5 * (lo + hi);
        candidate = rk4_core(rhs, prev, mid);
        if (candidate.phi > phi0)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(candidate.phi - phi0) <= sc.settings.event_tol) return candidate;
    throw SimulationError("latch-closure localization failed to reach event_tol");
}

AerialState synthesize_relocked(const AerialState& at_relock, double t) {
    AerialState s = at_relock;
    const double dt = t - at_relock.t;
    s.t = t;
    s.theta_a = at_relock.theta_a + at_relock.omega_a * dt;
    s.theta_b = at_relock.theta_b + at_relock.omega_b * dt;
    return s;
}

const AerialState* first_relocked(const AerialTrajectory& trajectory) {
    for (const AerialState& s : trajectory.states)
        if (s.latch == LatchMode::Relocked) return &s;
    return nullptr;
}

} // namespace

RotationRates rotational_derivatives(const AerialState& state, const Scenario& scenario) {
    if (state.latch != LatchMode::Open)
        throw StateError("rotational dynamics require an open latch");
    return Rhs(scenario)(state.theta_a, state.theta_b, state.omega_a, state.omega_b);
}

AerialState step_rk4(const AerialState& state, const Scenario& scenario, double dt) {
    if (state.latch != LatchMode::Open)
        throw StateError("integration requires an open latch");
    if (!(dt > 0.0)) throw DomainError("integration step must be positive");
    AerialState next = rk4_core(Rhs(scenario), state, dt);
    check_finite(next);
    return next;
}

std::optional<double> detect_relock(const AerialState& prev, const AerialState& next,
                                    const Scenario& scenario) {
    if (prev.latch != LatchMode::Open || next.latch != LatchMode::Open)
        throw StateError("relock detection requires open-latch samples");
    if (!(prev.t < next.t)) throw DomainError("samples must be time-ordered");
    auto located = locate_relock(Rhs(scenario), prev, next);
    if (!located) return std::nullopt;
    return located->t;
}

RelockEvent relock_impact(const AerialState& state, const MassProperties& masses) {
    if (state.latch != LatchMode::Open)
        throw StateError("relock impact requires an open latch");
    const double ja = masses.inertia_a;
    const double jb = masses.inertia_b;
    RelockEvent event;
    event.t_end = state.t;
    event.omega_a_before = state.omega_a;
    event.omega_b_before = state.omega_b;
    event.omega_end = (ja * state.omega_a + jb * state.omega_b) / (ja + jb);
    // variance identity for the lost kinetic energy; non-negative by
    // construction even in floating point
    const double rel = state.omega_a - state.omega_b;
    event.energy_dissipated = 0.5 * (ja * jb / (ja + jb)) * rel * rel;
    return event;
}

AerialTrajectory simulate_aerial(const Scenario& scenario) {
    if (!scenario.epj_enabled)
        throw StateError("aerial simulation requires an enabled joint; use the "
                         "rigid baseline otherwise");
    const Rhs rhs(scenario);
    const SimSettings& set = scenario.settings;

    AerialTrajectory traj;
    traj.adjusted_launch = takeoff_energy_partition(scenario);
    traj.flight_time = flight_duration(traj.adjusted_launch, set.gravity_g);
    const double horizon = std::min(traj.flight_time, set.t_max);
    const double t_end_abs = scenario.launch.t0 + horizon;

    AerialState state;
    state.t = scenario.launch.t0;
    state.theta_a = scenario.launch.theta_a0;
    state.theta_b = scenario.launch.theta_b0;
    state.omega_a = scenario.launch.omega_a0;
    state.omega_b = scenario.launch.omega_b0;
    state.phi = scenario.launch.phi0_open;
    state.latch = LatchMode::Open;
    traj.states.push_back(state);

    double min_phi = state.phi;
    std::optional<AerialState> relock_state;
    while (state.t < t_end_abs) {
        const double h = std::min(set.dt, t_end_abs - state.t);
        AerialState next = rk4_core(rhs, state, h);
        check_finite(next);
        if (auto located = locate_relock(rhs, state, next)) {
            relock_state = *located;
            break;
        }
        state = next;
        min_phi = std::min(min_phi, state.phi);
        traj.states.push_back(state);
    }

    if (!relock_state)
        throw SimulationError(
            std::string("latch never closed before ") +
            (horizon < set.t_max ? "landing" : "the watchdog horizon") +
            "; minimum joint angle reached = " + format_g9(min_phi) +
            " rad (spring too weak to close the joint)");

    traj.relock = relock_impact(*relock_state, scenario.mass_properties);

    AerialState closed = *relock_state;
    closed.latch = LatchMode::Relocked;
    closed.omega_a = traj.relock->omega_end;
    closed.omega_b = traj.relock->omega_end;
    traj.states.push_back(closed);

    // rigid coasting to landing, sampled on the same step grid
    const double t_land_abs = scenario.launch.t0 + horizon;
    for (int k = 1;; ++k) {
        const double t = closed.t + k * set.dt;
        if (t >= t_land_abs) break;
        traj.states.push_back(synthesize_relocked(closed, t));
    }
    if (t_land_abs > traj.states.back().t)
        traj.states.push_back(synthesize_relocked(closed, t_land_abs));
    return traj;
}

AerialTrajectory simulate_rigid(const Scenario& scenario) {
    const SimSettings& set = scenario.settings;
    AerialTrajectory traj;
    traj.adjusted_launch = scenario.launch;
    traj.flight_time = flight_duration(scenario.launch, set.gravity_g);
    const double horizon = std::min(traj.flight_time, set.t_max);

    AerialState base;
    base.t = scenario.launch.t0;
    base.theta_a = scenario.launch.theta_a0;
    base.theta_b = scenario.launch.theta_b0;
    base.omega_a = scenario.rigid_omega;
    base.omega_b = scenario.rigid_omega;
    base.phi = scenario.launch.phi0_open;
    base.latch = LatchMode::Locked;

    const int steps = static_cast<int>(horizon / set.dt);
    for (int k = 0; k <= steps; ++k) {
        const double dt = k * set.dt;
        AerialState s = base;
        s.t = base.t + dt;
        s.theta_a += scenario.rigid_omega * dt;
        s.theta_b += scenario.rigid_omega * dt;
        traj.states.push_back(s);
    }
    const double t_land_abs = scenario.launch.t0 + horizon;
    if (t_land_abs > traj.states.back().t) {
        AerialState s = base;
        s.t = t_land_abs;
        s.theta_a += scenario.rigid_omega * horizon;
        s.theta_b += scenario.rigid_omega * horizon;
        traj.states.push_back(s);
    }
    return traj;
}

double total_energy(const AerialState& state, const Scenario& scenario) {
    const MassProperties& m = scenario.mass_properties;
    return 0.5 * (m.inertia_a * state.omega_a * state.omega_a +
                  m.inertia_b * state.omega_b * state.omega_b) +
           spring_energy(spring_geometry(scenario.joint_design), state.phi);
}

double landing_flip_angle(const Scenario& scenario, const AerialTrajectory& trajectory) {
    if (!trajectory.relock)
        return scenario.rigid_omega * trajectory.flight_time;
    const AerialState* closed = first_relocked(trajectory);
    const double t_land_abs = scenario.launch.t0 + trajectory.flight_time;
    return (closed->theta_b - scenario.launch.theta_b0) +
           trajectory.relock->omega_end * (t_land_abs - closed->t);
}

JumpMetrics jump_metrics(const Scenario& scenario, const AerialTrajectory& trajectory) {
    const double g = scenario.settings.gravity_g;
    const LaunchState& launch = trajectory.adjusted_launch;
    JumpMetrics metrics;
    metrics.apex_height = apex_height(launch, g);
    metrics.landing_distance = landing_distance(launch, g);
    metrics.flight_time = trajectory.flight_time;
    if (trajectory.relock) {
        metrics.omega_end = trajectory.relock->omega_end;
        metrics.relock_time = trajectory.relock->t_end - scenario.launch.t0;
    } else {
        metrics.omega_end = scenario.rigid_omega;
    }
    metrics.distance_corrected = corrected_landing_distance(
        scenario, launch, landing_flip_angle(scenario, trajectory));
    return metrics;
}

void write_trajectory_csv(std::ostream& out, const Scenario& scenario,
                          const AerialTrajectory& trajectory) {
    out << "t,theta_a,theta_b,omega_a,omega_b,phi,latch,com_x,com_y,energy\n";
    for (const AerialState& s : trajectory.states) {
        const BallisticState com = ballistic_state(
            trajectory.adjusted_launch, scenario.settings.gravity_g,
            s.t - scenario.launch.t0);
        out << format_g9(s.t) << ',' << format_g9(s.theta_a) << ','
            << format_g9(s.theta_b) << ',' << format_g9(s.omega_a) << ','
            << format_g9(s.omega_b) << ',' << format_g9(s.phi) << ','
            << to_string(s.latch) << ',' << format_g9(com.x) << ','
            << format_g9(com.y) << ',' << format_g9(total_energy(s, scenario))
            << '\n';
    }
}

} // namespace epj
