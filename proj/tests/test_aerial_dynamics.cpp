#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "epj/aerial_dynamics.hpp"
#include "epj/model.hpp"
#include "epj/spring_joint.hpp"
#include "oracles.hpp"

using namespace epj;

namespace {

AerialState launch_state(const Scenario& s) {
    AerialState st;
    st.t = s.launch.t0;
    st.theta_a = s.launch.theta_a0;
    st.theta_b = s.launch.theta_b0;
    st.omega_a = s.launch.omega_a0;
    st.omega_b = s.launch.omega_b0;
    st.phi = s.launch.phi0_open;
    st.latch = LatchMode::Open;
    return st;
}

Scenario opening_launch_scenario(double k) {
    Scenario s = default_reference_scenario();
    s.launch.omega_a0 = -29.99;
    s.launch.omega_b0 = 0.02;
    s.joint_design.stiffness_k = k;
    return s;
}

} // namespace

TEST_CASE("derivatives: torque-free joint keeps all rates constant") {
    Scenario s = default_reference_scenario();
    s.joint_design.stiffness_k = 0.0;
    const RotationRates r = rotational_derivatives(launch_state(s), s);
    CHECK(r.d_omega_a == 0.0);
    CHECK(r.d_omega_b == 0.0);
    CHECK(r.d_theta_a == s.launch.omega_a0);
    CHECK(r.d_theta_b == s.launch.omega_b0);
}

TEST_CASE("derivatives: equal inertias receive equal angular acceleration") {
    Scenario s = default_reference_scenario();
    s.geometry.reset();
    s.mass_properties.inertia_a = 3e-4;
    s.mass_properties.inertia_b = 3e-4;
    const RotationRates r = rotational_derivatives(launch_state(s), s);
    CHECK(r.d_omega_a == r.d_omega_b);
    CHECK(r.d_omega_a > 0.0); // stretched spring closes the joint
}

TEST_CASE("derivatives: acceleration equals the hand-computed torque over J") {
    Scenario s = default_reference_scenario();
    s.geometry.reset();
    s.joint_design.l_oc = 0.03;
    s.joint_design.l_od = 0.04;
    s.joint_design.natural_length_l0 = 0.03;
    s.joint_design.stiffness_k = 1566.0;
    AerialState st = launch_state(s);
    st.theta_a = s.launch.theta_a0 + (s.launch.phi0_open - std::numbers::pi / 2);
    st.phi = std::numbers::pi / 2;
    const RotationRates r = rotational_derivatives(st, s);
    CHECK(r.d_omega_a ==
          doctest::Approx(0.75168 / s.mass_properties.inertia_a).epsilon(1e-12));
}

TEST_CASE("derivatives refuse a latched state") {
    const Scenario s = default_reference_scenario();
    AerialState st = launch_state(s);
    st.latch = LatchMode::Relocked;
    CHECK_THROWS_AS(rotational_derivatives(st, s), StateError);
}

TEST_CASE("rk4: constant-rate rotation advances exactly") {
    Scenario s = default_reference_scenario();
    s.joint_design.stiffness_k = 0.0;
    s.launch.omega_a0 = 1.0;
    s.launch.omega_b0 = 0.0;
    const AerialState next = step_rk4(launch_state(s), s, 0.01);
    CHECK(next.theta_a == doctest::Approx(s.launch.theta_a0 + 0.01).epsilon(1e-15));
    CHECK(next.omega_a == 1.0);
    CHECK(next.phi == doctest::Approx(s.launch.phi0_open - 0.01).epsilon(1e-12));
}

TEST_CASE("rk4: time reversal returns the start state to O(dt^5)") {
    const Scenario s = default_reference_scenario();
    AerialState st = launch_state(s);
    const double dt = 1e-4;
    AerialState fwd = step_rk4(st, s, dt);
    fwd.omega_a = -fwd.omega_a;
    fwd.omega_b = -fwd.omega_b;
    AerialState back = step_rk4(fwd, s, dt);
    CHECK(back.theta_a == doctest::Approx(st.theta_a).epsilon(1e-10));
    CHECK(back.theta_b == doctest::Approx(st.theta_b).epsilon(1e-10));
    CHECK(-back.omega_a == doctest::Approx(st.omega_a).epsilon(1e-10));
    CHECK(-back.omega_b == doctest::Approx(st.omega_b).epsilon(1e-10));
}

TEST_CASE("rk4: smooth-horizon convergence order is at least 3.5") {
    const Scenario s = default_reference_scenario();
    const double horizon = 1e-3; // inside the open phase
    auto integrate = [&](double dt) {
        AerialState st = launch_state(s);
        const int n = static_cast<int>(horizon / dt);
        for (int i = 0; i < n; ++i) st = step_rk4(st, s, dt);
        return st;
    };
    const AerialState a = integrate(4e-5);
    const AerialState b = integrate(2e-5);
    const AerialState ref = integrate(4e-7);
    const double ea = std::abs(a.omega_a - ref.omega_a);
    const double eb = std::abs(b.omega_a - ref.omega_a);
    REQUIRE(eb > 0.0);
    CHECK(std::log2(ea / eb) >= 3.5);
}

TEST_CASE("rk4 rejects a non-positive step and non-finite states") {
    const Scenario s = default_reference_scenario();
    CHECK_THROWS_AS(step_rk4(launch_state(s), s, 0.0), DomainError);
    AerialState st = launch_state(s);
    st.omega_a = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(step_rk4(st, s, 1e-5), SimulationError);
}

TEST_CASE("relock detection localizes a linear crossing analytically") {
    // k = 0 makes phi(t) exactly linear: phi' = -(wA + wB)
    Scenario s = default_reference_scenario();
    s.joint_design.stiffness_k = 0.0;
    const double rate = s.launch.omega_a0 + s.launch.omega_b0;
    const AerialState st = launch_state(s);
    const double dt = 5e-3; // long enough for the 0.122 rad travel at ~30 rad/s
    const AerialState next = step_rk4(st, s, dt);
    REQUIRE(next.phi < s.joint_design.latch_angle_phi0);
    const auto t_cross = detect_relock(st, next, s);
    REQUIRE(t_cross.has_value());
    const double expected =
        st.t + (st.phi - s.joint_design.latch_angle_phi0) / rate;
    // the event is localized in phi; convert the tolerance to time
    CHECK(std::abs(*t_cross - expected) <= s.settings.event_tol / rate);
}

TEST_CASE("relock detection returns nothing without a bracket") {
    const Scenario s = default_reference_scenario();
    const AerialState st = launch_state(s);
    const AerialState next = step_rk4(st, s, 1e-5);
    REQUIRE(next.phi > s.joint_design.latch_angle_phi0);
    CHECK_FALSE(detect_relock(st, next, s).has_value());
}

TEST_CASE("relock impact: momentum-weighted mean and dissipation") {
    MassProperties m;
    m.mass_a = 0.03;
    m.mass_b = 0.12;
    m.inertia_a = 2e-4;
    m.inertia_b = 8e-4;
    AerialState st;
    st.omega_a = 10.0;
    st.omega_b = -1.0;
    st.latch = LatchMode::Open;
    const RelockEvent e = relock_impact(st, m);
    CHECK(e.omega_end == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(e.energy_dissipated >= 0.0);
    // momentum identical before and after, kinetic energy not increased
    CHECK(m.inertia_a * st.omega_a + m.inertia_b * st.omega_b ==
          doctest::Approx((m.inertia_a + m.inertia_b) * e.omega_end)
              .epsilon(1e-14));
    const double ke_before = 0.5 * (m.inertia_a * 100.0 + m.inertia_b * 1.0);
    const double ke_after = 0.5 * (m.inertia_a + m.inertia_b) * e.omega_end * e.omega_end;
    CHECK(ke_after <= ke_before);
    CHECK(e.energy_dissipated == doctest::Approx(ke_before - ke_after).epsilon(1e-12));

    // no relative motion: nothing changes, nothing dissipates
    st.omega_a = st.omega_b = 2.5;
    const RelockEvent same = relock_impact(st, m);
    CHECK(same.omega_end == 2.5);
    CHECK(same.energy_dissipated == 0.0);

    // equal and opposite momenta cancel
    m.inertia_b = m.inertia_a;
    st.omega_a = 3.0;
    st.omega_b = -3.0;
    CHECK(relock_impact(st, m).omega_end == 0.0);
}

TEST_CASE("aerial simulation: reference run relocks and suppresses the flip") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory traj = simulate_aerial(s);
    REQUIRE(traj.relock.has_value());
    CHECK(std::abs(traj.relock->omega_end) < std::abs(s.rigid_omega));
    CHECK(traj.relock->t_end < 0.01); // the latch snaps shut early in flight
    // first sample equals the launch state
    CHECK(traj.states.front().theta_a == s.launch.theta_a0);
    CHECK(traj.states.front().omega_a == s.launch.omega_a0);
    CHECK(traj.states.front().phi == s.launch.phi0_open);
    // strictly increasing time
    for (size_t i = 1; i < traj.states.size(); ++i)
        CHECK(traj.states[i].t > traj.states[i - 1].t);
    // event accuracy
    const double phi_end = traj.states.back().phi;
    CHECK(std::abs(phi_end - s.joint_design.latch_angle_phi0) <=
          s.settings.event_tol);
}

TEST_CASE("aerial simulation matches the closed-form omega_end oracle") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory traj = simulate_aerial(s);
    CHECK(traj.relock->omega_end ==
          doctest::Approx(test::omega_end_oracle(s)).epsilon(1e-7));
    // and at a different stiffness
    const Scenario stiff = with_stiffness(s, 2400.0);
    CHECK(simulate_aerial(stiff).relock->omega_end ==
          doctest::Approx(test::omega_end_oracle(stiff)).epsilon(1e-7));
}

TEST_CASE("open phase conserves rotational + spring energy to 1e-6 relative") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory traj = simulate_aerial(s);
    const double e0 = total_energy(traj.states.front(), s);
    for (const AerialState& st : traj.states) {
        if (st.latch != LatchMode::Open) break;
        CHECK(std::abs(total_energy(st, s) - e0) <= 1e-6 * std::max(e0, 1e-12));
    }
}

TEST_CASE("angle bookkeeping: stored phi equals the recomputed difference") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory traj = simulate_aerial(s);
    for (const AerialState& st : traj.states) {
        if (st.latch != LatchMode::Open) break;
        const double recomputed = s.launch.phi0_open -
                                  (st.theta_a - s.launch.theta_a0) -
                                  (st.theta_b - s.launch.theta_b0);
        CHECK(std::abs(st.phi - recomputed) <= 1e-9);
    }
}

TEST_CASE("momentum conserved across the relock to machine precision") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory traj = simulate_aerial(s);
    const RelockEvent& e = *traj.relock;
    const double before = s.mass_properties.inertia_a * e.omega_a_before +
                          s.mass_properties.inertia_b * e.omega_b_before;
    const double after =
        (s.mass_properties.inertia_a + s.mass_properties.inertia_b) * e.omega_end;
    CHECK(std::abs(before - after) <= 1e-12 * std::abs(before));
}

TEST_CASE("torque-free opening joint never closes: watchdog with min phi") {
    const Scenario s = opening_launch_scenario(0.0);
    CHECK_THROWS_WITH_AS(
        (void)simulate_aerial(s),
        doctest::Contains("latch never closed"), SimulationError);
    try {
        (void)simulate_aerial(s);
    } catch (const SimulationError& e) {
        CHECK(std::string(e.what()).find("minimum joint angle") != std::string::npos);
    }
}

TEST_CASE("a stiff spring reverses an opening launch and still relocks") {
    const Scenario s = opening_launch_scenario(4000.0);
    const AerialTrajectory traj = simulate_aerial(s);
    CHECK(traj.relock.has_value());
}

TEST_CASE("degenerate equality: pre-closed springless joint matches the baseline") {
    // both mechanisms already rotate together at the baseline rate and the
    // latch angle sits a hair below the opening, so the joint snaps shut
    // immediately and changes nothing
    Scenario s = default_reference_scenario();
    s.joint_design.stiffness_k = 0.0;
    s.launch.omega_a0 = 3.46;
    s.launch.omega_b0 = 3.46;
    s.rigid_omega = 3.46;
    s.joint_design.latch_angle_phi0 = s.launch.phi0_open - 1e-5;
    const JumpMetrics m_epj = jump_metrics(s, simulate_aerial(s));
    const JumpMetrics m_rigid = jump_metrics(s, simulate_rigid(s));
    const double reduction =
        1.0 - std::abs(m_epj.omega_end) / std::abs(m_rigid.omega_end);
    CHECK(std::abs(reduction) < 1e-12);
}

TEST_CASE("aerial simulation requires the joint to be enabled") {
    Scenario s = default_reference_scenario();
    s.epj_enabled = false;
    CHECK_THROWS_AS((void)simulate_aerial(s), StateError);
}

TEST_CASE("rigid baseline: constant angular velocity throughout") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory traj = simulate_rigid(s);
    CHECK_FALSE(traj.relock.has_value());
    for (const AerialState& st : traj.states) {
        CHECK(st.omega_a == s.rigid_omega);
        CHECK(st.omega_b == s.rigid_omega);
        CHECK(st.latch == LatchMode::Locked);
    }
    // total rotation equals rate * flight time exactly
    const AerialState& last = traj.states.back();
    CHECK(last.theta_b - s.launch.theta_b0 == s.rigid_omega * traj.flight_time);

    Scenario still = s;
    still.rigid_omega = 0.0;
    for (const AerialState& st : simulate_rigid(still).states)
        CHECK(st.theta_b == still.launch.theta_b0);
}

TEST_CASE("trajectories are bit-identical across repeated simulation") {
    const Scenario s = default_reference_scenario();
    const AerialTrajectory a = simulate_aerial(s);
    const AerialTrajectory b = simulate_aerial(s);
    REQUIRE(a.states.size() == b.states.size());
    for (size_t i = 0; i < a.states.size(); ++i) {
        CHECK(a.states[i].t == b.states[i].t);
        CHECK(a.states[i].theta_a == b.states[i].theta_a);
        CHECK(a.states[i].omega_a == b.states[i].omega_a);
        CHECK(a.states[i].phi == b.states[i].phi);
    }
    CHECK(a.relock->omega_end == b.relock->omega_end);
}

TEST_CASE("trajectory CSV carries the contracted header and latch states") {
    const Scenario s = default_reference_scenario();
    std::ostringstream out;
    write_trajectory_csv(out, s, simulate_aerial(s));
    const std::string text = out.str();
    CHECK(text.rfind("t,theta_a,theta_b,omega_a,omega_b,phi,latch,com_x,com_y,energy\n",
                     0) == 0);
    CHECK(text.find(",Open,") != std::string::npos);
    CHECK(text.find(",Relocked,") != std::string::npos);
}
