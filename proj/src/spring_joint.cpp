#include "epj/spring_joint.hpp"

#include <cmath>
#include <numbers>

namespace epj {

namespace {

constexpr double kPi = std::numbers::pi;

void check_phi(double phi) {
    if (!(phi >= 0.0 && phi <= kPi))
        throw DomainError("joint angle must lie in [0, pi]");
}

double length_unchecked(const SpringGeometry& g, double phi) {
    return std::sqrt(g.l_oc * g.l_oc + g.l_od * g.l_od -
                     2.0 * g.l_oc * g.l_od * std::cos(phi));
}

double axial_force(const SpringGeometry& g, double length) {
    double f = g.stiffness_k * (length - g.natural_length_l0);
    if (g.tension_only && f < 0.0) f = 0.0;
    return f;
}

} // namespace

namespace {

/// Shared evaluation core; phi is unchecked and treated periodically.
/// Returns a zero load for a vanished spring length.
JointLoad load_core(const SpringGeometry& g, double phi) {
    JointLoad load;
    load.length_l = length_unchecked(g, phi);
    if (load.length_l == 0.0) return load;
    load.elongation = load.length_l - g.natural_length_l0;
    load.force_f = axial_force(g, load.length_l);
    load.sin_phi1 = g.l_od / load.length_l * std::sin(phi);
    load.torque_m = load.force_f * g.l_oc * load.sin_phi1;
    return load;
}

} // namespace

SpringGeometry spring_geometry(const JointDesign& design) {
    return {design.l_oc, design.l_od, design.natural_length_l0,
            design.stiffness_k, design.tension_only};
}

double spring_length(const SpringGeometry& geometry, double phi) {
    check_phi(phi);
    return length_unchecked(geometry, phi);
}

double spring_force(const SpringGeometry& geometry, double phi) {
    return axial_force(geometry, spring_length(geometry, phi));
}

double joint_torque(const SpringGeometry& geometry, double phi) {
    return joint_load(geometry, phi).torque_m;
}

JointLoad joint_load(const SpringGeometry& geometry, double phi) {
    check_phi(phi);
    const JointLoad load = load_core(geometry, phi);
    if (load.length_l == 0.0)
        throw DomainError("spring length vanished (l_oc == l_od with phi == 0); "
                          "the arm/spring angle is undefined");
    return load;
}

double joint_torque_periodic(const SpringGeometry& geometry, double phi) {
    return load_core(geometry, phi).torque_m;
}

double spring_energy(const SpringGeometry& geometry, double phi) {
    const double dl = length_unchecked(geometry, phi) - geometry.natural_length_l0;
    if (geometry.tension_only && dl < 0.0) return 0.0;
    return 0.5 * geometry.stiffness_k * dl * dl;
}

} // namespace epj
