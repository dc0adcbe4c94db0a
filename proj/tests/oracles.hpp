#pragma once

// Test-only oracles, deliberately independent of the library's evaluation
// paths: they spell out the geometry and energy arguments from scratch so
// a shared bug cannot hide.

#include <cmath>
#include <cstdint>

#include "epj/model.hpp"

namespace epj::test {

/// Deterministic 64-bit mixer (splitmix64); the suite never uses the
/// standard library's RNG so results are identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    std::uint64_t state_;
};

inline double law_of_cosines(double a, double b, double angle) {
    return std::sqrt(a * a + b * b - 2.0 * a * b * std::cos(angle));
}

/// Closed-form omega_end for a monotonically closing joint with a
/// bidirectional spring, from two conservation arguments:
///  - the closing rate u = wA + wB obeys the 1-dof energy balance
///    0.5 Jeff u^2 + V(phi) = const with Jeff = JA JB / (JA + JB),
///  - both mechanisms receive the same torque impulse I = Jeff (u_end - u0),
///    so JA wA + JB wB grows by exactly 2 I,
/// followed by the momentum-weighted relock average. Valid while u stays
/// positive, which holds for the reference family (u0 ~ 30 rad/s).
inline double omega_end_oracle(const Scenario& s) {
    const double ja = s.mass_properties.inertia_a;
    const double jb = s.mass_properties.inertia_b;
    const double jeff = ja * jb / (ja + jb);
    const double lc = s.joint_design.l_oc;
    const double ld = s.joint_design.l_od;
    const double l0 = s.joint_design.natural_length_l0;
    const double k = s.joint_design.stiffness_k;
    auto potential = [&](double phi) {
        const double dl = law_of_cosines(lc, ld, phi) - l0;
        return 0.5 * k * dl * dl;
    };
    const double u0 = s.launch.omega_a0 + s.launch.omega_b0;
    const double dv = potential(s.launch.phi0_open) -
                      potential(s.joint_design.latch_angle_phi0);
    const double u_end = std::sqrt(u0 * u0 + 2.0 * dv / jeff);
    const double impulse = jeff * (u_end - u0);
    return (ja * s.launch.omega_a0 + jb * s.launch.omega_b0 + 2.0 * impulse) /
           (ja + jb);
}

} // namespace epj::test
