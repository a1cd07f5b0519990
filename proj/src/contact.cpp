#include "crossing_lab/contact.hpp"

#include <algorithm>
#include <cmath>

namespace crossing_lab {

void ContactParams::validate() const {
    if (!(stiffness > 0.0)) throw ConfigError("contact.stiffness must be > 0");
    if (!(force_exponent >= 1.0)) throw ConfigError("contact.force_exponent must be >= 1");
    if (!(damping_max >= 0.0)) throw ConfigError("contact.damping_max must be >= 0");
    if (!(penetration_depth > 0.0)) throw ConfigError("contact.penetration_depth must be > 0");
    if (!(mu_dynamic >= 0.0 && mu_dynamic <= mu_static))
        throw ConfigError("contact must satisfy 0 <= mu_dynamic <= mu_static");
    if (!(stiction_vel > 0.0 && stiction_vel < friction_vel))
        throw ConfigError("contact must satisfy 0 < stiction_vel < friction_vel");
}

double step_smooth(double x, double x0, double h0, double x1, double h1) {
    if (x0 == x1) throw std::invalid_argument("step_smooth: x0 == x1");
    double u = (x - x0) / (x1 - x0);
    u = std::clamp(u, 0.0, 1.0);
    return h0 + (h1 - h0) * u * u * (3.0 - 2.0 * u);
}

double impact_force(double wr, double wr1, double wr1_dot, const ContactParams& p) {
    if (wr1 >= wr) return 0.0;
    const double pen = wr - wr1;
    const double elastic = p.stiffness * std::pow(pen, p.force_exponent);
    const double ramp = step_smooth(wr1, wr - p.penetration_depth, 1.0, wr, 0.0);
    const double f = elastic - p.damping_max * wr1_dot * ramp;
    return std::max(f, 0.0);
}

double friction_coefficient(double slip_speed, const ContactParams& p) {
    if (slip_speed <= 0.0) return 0.0;
    if (slip_speed >= p.friction_vel) return p.mu_dynamic;
    if (slip_speed <= p.stiction_vel)
        return step_smooth(slip_speed, 0.0, 0.0, p.stiction_vel, p.mu_static);
    return step_smooth(slip_speed, p.stiction_vel, p.mu_static, p.friction_vel, p.mu_dynamic);
}

namespace {

ContactProbe make_probe(const Vec2& center, const Vec2& surface_point, const Vec2& normal,
                        SurfaceFeature feature) {
    ContactProbe pr;
    pr.surface_point = surface_point;
    pr.normal = normal;
    pr.tangent = Vec2{normal.z, -normal.x}; // normal rotated -90 deg
    pr.separation = (center - surface_point).dot(normal);
    pr.feature = feature;
    return pr;
}

// Nearest point of the step boundary (face x = ox, 0 <= z <= h; corner
// (ox, h); top z = h for x >= ox) to a disc center left of / above the bar.
ContactProbe step_probe(const Vec2& c, double h, double ox) {
    if (c.x <= ox) {
        if (c.z <= h) {
            // Step face. Normal points away from the bar toward the center.
            return make_probe(c, Vec2{ox, std::max(c.z, 0.0)}, Vec2{-1.0, 0.0},
                              SurfaceFeature::StepFace);
        }
        const Vec2 corner{ox, h};
        Vec2 n = c - corner;
        const double d = n.norm();
        if (d == 0.0) n = Vec2{-1.0, 0.0}; else n = n * (1.0 / d);
        ContactProbe pr = make_probe(c, corner, n, SurfaceFeature::StepCorner);
        pr.separation = d;
        return pr;
    }
    if (c.z >= h) {
        return make_probe(c, Vec2{c.x, h}, Vec2{0.0, 1.0}, SurfaceFeature::StepTop);
    }
    // Center inside the bar: report the nearest exit (face or top) with
    // zero separation so the penalty force pushes outward.
    const double to_face = c.x - ox;
    const double to_top = h - c.z;
    ContactProbe pr = (to_face < to_top)
        ? make_probe(c, Vec2{ox, c.z}, Vec2{-1.0, 0.0}, SurfaceFeature::StepFace)
        : make_probe(c, Vec2{c.x, h}, Vec2{0.0, 1.0}, SurfaceFeature::StepTop);
    pr.separation = 0.0;
    return pr;
}

} // namespace

std::vector<ContactProbe> probe_wheel_vs_step_all(const Vec2& center, double wheel_radius,
                                                  double obstacle_height, double obstacle_x) {
    if (!(wheel_radius > 0.0)) throw std::invalid_argument("wheel_radius must be > 0");
    if (obstacle_height < 0.0) throw std::invalid_argument("obstacle_height must be >= 0");
    std::vector<ContactProbe> probes;
    probes.push_back(make_probe(center, Vec2{center.x, 0.0}, Vec2{0.0, 1.0},
                                SurfaceFeature::GroundPlane));
    if (obstacle_height > 0.0) probes.push_back(step_probe(center, obstacle_height, obstacle_x));
    return probes;
}

std::vector<ContactProbe> probe_wheel_vs_step(const Vec2& center, double wheel_radius,
                                              double obstacle_height, double obstacle_x) {
    std::vector<ContactProbe> probes =
        probe_wheel_vs_step_all(center, wheel_radius, obstacle_height, obstacle_x);
    std::erase_if(probes, [&](const ContactProbe& p) { return p.separation > wheel_radius; });
    return probes;
}

ContactForce contact_force(const ContactProbe& probe, double wheel_radius,
                           const Vec2& contact_point_velocity, const ContactParams& p) {
    ContactForce f;
    if (probe.separation >= wheel_radius) return f;
    const double approach_rate = contact_point_velocity.dot(probe.normal);
    f.penetration = wheel_radius - probe.separation;
    f.normal_magnitude = impact_force(wheel_radius, probe.separation, approach_rate, p);
    const double slip = contact_point_velocity.dot(probe.tangent);
    const double mu = friction_coefficient(std::abs(slip), p);
    f.tangential_magnitude = (slip > 0.0 ? -1.0 : (slip < 0.0 ? 1.0 : 0.0)) * mu * f.normal_magnitude;
    f.world_force = probe.normal * f.normal_magnitude + probe.tangent * f.tangential_magnitude;
    return f;
}

} // namespace crossing_lab
