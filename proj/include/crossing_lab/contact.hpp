#ifndef CROSSING_LAB_CONTACT_HPP
#define CROSSING_LAB_CONTACT_HPP

#include <vector>

#include "crossing_lab/core.hpp"

namespace crossing_lab {

/// Penalty-contact and friction constants. All values in SI (m, N, s).
/// Paper-unit inputs (N/mm etc.) are converted at configuration load; note
/// that a stiffness quoted in N/mm with force exponent e converts as
/// k_SI = k_mm * 1000^e because the force law is k * penetration^e.
struct ContactParams {
    double stiffness = 1000.0 * 1995.26231496888;   // N/m^e (1000 N/mm, e=1.1)
    double force_exponent = 1.1;
    double damping_max = 1.0e4;                     // N*s/m (10 N*s/mm)
    double penetration_depth = 1.0e-5;              // m (0.01 mm)
    double mu_static = 1.0;
    double mu_dynamic = 0.95;
    double stiction_vel = 1.5;                      // m/s (1500 mm/s)
    double friction_vel = 4.0;                      // m/s (4000 mm/s)

    void validate() const;
};

enum class SurfaceFeature { GroundPlane, StepFace, StepCorner, StepTop };

/// Result of a closest-point query between a wheel disc and one surface
/// feature. `separation` is the center-to-surface distance; its rate is
/// filled in by the caller once velocities are known.
struct ContactProbe {
    double separation = 0.0;        // wr1, m
    double separation_rate = 0.0;   // m/s
    Vec2 normal{0.0, 1.0};          // unit, surface -> center
    Vec2 tangent{1.0, 0.0};         // unit, normal rotated -90 deg
    Vec2 surface_point{0.0, 0.0};   // m
    SurfaceFeature feature = SurfaceFeature::GroundPlane;
};

struct ContactForce {
    double normal_magnitude = 0.0;     // N, >= 0
    double tangential_magnitude = 0.0; // N, signed along tangent
    Vec2 world_force{0.0, 0.0};
    double penetration = 0.0;          // m
};

/// C1 cubic Hermite blend: h0 for x on the x0 side, h1 on the x1 side,
/// zero slope at both ends. Adams STEP semantics.
double step_smooth(double x, double x0, double h0, double x1, double h1);

/// One-sided penalty normal force k*(wr - wr1)^e minus STEP-ramped damping
/// on the separation rate; zero when separated, clamped to >= 0.
double impact_force(double wr, double wr1, double wr1_dot, const ContactParams& p);

/// Velocity-smoothed Coulomb coefficient: 0 at zero slip, mu_s at the
/// stiction transition velocity, mu_d at and beyond the friction
/// transition velocity.
double friction_coefficient(double slip_speed, const ContactParams& p);

/// Closest-point probes of a wheel disc against the ground plane (z = 0)
/// and a rectangular step of height `obstacle_height` occupying
/// x >= obstacle_x. Returns at most two probes (ground + nearest step
/// feature), only those with separation <= wheel_radius.
std::vector<ContactProbe> probe_wheel_vs_step(const Vec2& center, double wheel_radius,
                                              double obstacle_height, double obstacle_x);

/// Same queries without the contact cut-off; used by force assembly to
/// track signed clearances even out of contact.
std::vector<ContactProbe> probe_wheel_vs_step_all(const Vec2& center, double wheel_radius,
                                                  double obstacle_height, double obstacle_x);

/// Composes normal penalty force and smoothed Coulomb friction for one
/// probe. `contact_point_velocity` is the material velocity of the wheel
/// surface point at the contact.
ContactForce contact_force(const ContactProbe& probe, double wheel_radius,
                           const Vec2& contact_point_velocity, const ContactParams& p);

} // namespace crossing_lab

#endif
