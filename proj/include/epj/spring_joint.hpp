#pragma once

#include "epj/model.hpp"

namespace epj {

/// Spring geometry of the passive joint: two arms meeting at the revolute
/// axis with a linear spring spanning their free ends.
struct SpringGeometry {
    double l_oc = 0.0;
    double l_od = 0.0;
    double natural_length_l0 = 0.0;
    double stiffness_k = 0.0;
    bool tension_only = false;
};

/// Everything the spring exerts at one joint angle.
struct JointLoad {
    double length_l = 0.0;   ///< spring length [m]
    double elongation = 0.0; ///< L - L0 [m], negative when compressed
    double force_f = 0.0;    ///< axial spring force [N]
    double torque_m = 0.0;   ///< torque about O applied to each mechanism [N m]
    double sin_phi1 = 0.0;   ///< sine of the arm/spring angle (law of sines)
};

SpringGeometry spring_geometry(const JointDesign& design);

/// Spring length by the law of cosines. phi must lie in [0, pi].
double spring_length(const SpringGeometry& geometry, double phi);

/// Axial force k*(L - L0); negative in compression unless tension_only.
double spring_force(const SpringGeometry& geometry, double phi);

/// Torque magnitude k*l_oc*(L - L0)*sin(phi1) with
/// sin(phi1) = (l_od / L) * sin(phi). Sign assignment belongs to the
/// dynamics module.
double joint_torque(const SpringGeometry& geometry, double phi);

JointLoad joint_load(const SpringGeometry& geometry, double phi);

/// Torque evaluated from the periodic law-of-cosines forms, valid for any
/// phi. The [0, pi] restriction above is a contract of the public
/// operations; integration may transiently leave that interval when the
/// joint over-extends, and this evaluation keeps the field conservative
/// there (sin(phi) flips the restoring direction past pi).
double joint_torque_periodic(const SpringGeometry& geometry, double phi);

/// Stored elastic energy 0.5*k*(L - L0)^2 at any phi; zero for a clamped
/// tension-only spring shorter than L0.
double spring_energy(const SpringGeometry& geometry, double phi);

} // namespace epj
