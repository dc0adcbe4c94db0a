#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "epj/errors.hpp"

namespace epj {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Latch state machine of the passive joint. Transitions are
/// Locked -> Open (pre-supplied trigger) and Open -> Relocked (closure
/// impact); Relocked is terminal.
enum class LatchMode { Locked, Open, Relocked };

const char* to_string(LatchMode mode);

/// Masses of the two hinged mechanisms and their rotational inertias
/// about the revolute axis O.
struct MassProperties {
    double mass_a = 0.0;     ///< leg + rear frame [kg]
    double mass_b = 0.0;     ///< body [kg]
    double inertia_a = 0.0;  ///< mechanism A about O [kg m^2]
    double inertia_b = 0.0;  ///< mechanism B about O [kg m^2]
};

/// Joint placement and spring parameters. Coordinates are body-frame
/// meters: x from the rear end of the body, y from its lowest point.
struct JointDesign {
    double joint_x = 0.0;
    double joint_y = 0.0;
    double l_oc = 0.0;              ///< arm O-C [m]
    double l_od = 0.0;              ///< arm O-D [m]
    double natural_length_l0 = 0.0; ///< spring natural length [m]
    double stiffness_k = 0.0;       ///< [N/m]
    double latch_angle_phi0 = 0.0;  ///< closure angle [rad]
    bool tension_only = false;      ///< clamp compressive spring force at zero
};

/// Take-off outcome handed to the aerial phase. Angular rates follow the
/// joint-angle bookkeeping convention: positive rotation of either
/// mechanism closes the joint (phi decreasing).
struct LaunchState {
    double t0 = 0.0;
    Vec2 com_position;
    Vec2 com_velocity;
    double theta_a0 = 0.0;
    double theta_b0 = 0.0;
    double omega_a0 = 0.0;
    double omega_b0 = 0.0;
    double phi0_open = 0.0; ///< joint opening at take-off [rad]
};

struct SimSettings {
    double dt = 1e-5;              ///< fixed integrator step [s]
    double t_max = 2.0;            ///< watchdog horizon [s]
    double event_tol = 1e-9;       ///< latch-closure localization [rad]
    double gravity_g = 9.81;       ///< [m/s^2]
    double omega_zero_tol = 1e-4;  ///< root-finder convergence [rad/s]
};

/// Body-frame layout used to re-derive arms and inertias when the joint
/// moves: spring anchors C (on mechanism A) and D (on mechanism B), the
/// segment centers of mass, and inertias about those centers.
struct BodyGeometry {
    Vec2 anchor_c;
    Vec2 anchor_d;
    Vec2 com_a;
    Vec2 com_b;
    double inertia_a_com = 0.0;
    double inertia_b_com = 0.0;
};

/// A complete, validated simulation scenario. Immutable after load; safe
/// to share across sweep workers.
struct Scenario {
    bool epj_enabled = true;
    MassProperties mass_properties;
    JointDesign joint_design;
    LaunchState launch;
    SimSettings settings;
    double rigid_omega = 0.0; ///< baseline angular velocity when the joint stays locked
    std::optional<BodyGeometry> geometry; ///< present when loaded from anchor coordinates

    /// Mass-weighted robot CoM in the body frame; (0,0) without geometry.
    Vec2 robot_com() const;
};

/// Parse an INI-style scenario document, convert to SI and validate.
/// Throws ConfigError naming the offending key.
Scenario load_scenario(std::string_view config_text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Serialize with 17 significant digits so that load(serialize(s))
/// reproduces every field bit-identically.
std::string scenario_to_config_text(const Scenario& scenario);

/// The repository's calibrated reference scenario (geometric mode).
Scenario default_reference_scenario();

/// Clone with the revolute joint moved; arms and inertias are re-derived
/// from the stored anchors and segment CoMs. Requires geometry.
Scenario with_joint_position(const Scenario& base, double x_m, double y_m);

/// Clone with a different spring stiffness.
Scenario with_stiffness(const Scenario& base, double k_n_per_m);

} // namespace epj
