#include "crossing_lab/vehicle.hpp"

#include <algorithm>
#include <cmath>

namespace crossing_lab {

void VehicleParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("vehicle.") + name + " must be > 0");
    };
    positive(chassis_mass, "chassis_mass");
    positive(chassis_pitch_inertia, "chassis_pitch_inertia");
    positive(axle_mass, "axle_mass");
    positive(wheel_spin_inertia, "wheel_spin_inertia");
    positive(wheel_radius, "wheel_radius");
    positive(wheelbase, "wheelbase");
    positive(z_cog, "z_cog");
    positive(susp_stiffness, "susp_stiffness");
    positive(front_longitudinal_stiffness, "front_longitudinal_stiffness");
    positive(front_longitudinal_damping, "front_longitudinal_damping");
    positive(stroke_limit, "stroke_limit");
    positive(vertical_stroke_limit, "vertical_stroke_limit");
    positive(endstop_stiffness, "endstop_stiffness");
    positive(strut_length, "strut_length");
    if (!(susp_vertical_damping >= 0.0))
        throw ConfigError("vehicle.susp_vertical_damping must be >= 0");
    if (!(torque_min <= torque_max))
        throw ConfigError("vehicle.torque_min must be <= torque_max");
}

ControllerState speed_controller_step(const ControllerState& ctrl, double measured_speed,
                                      double dt, double torque_min, double torque_max,
                                      const ControllerGains& gains) {
    if (!(dt > 0.0)) throw std::invalid_argument("speed_controller_step: dt must be > 0");
    ControllerState next = ctrl;
    if (ctrl.mode != ControllerMode::SpeedHold) {
        next.commanded_torque = std::clamp(ctrl.commanded_torque, torque_min, torque_max);
        return next;
    }
    const double error = ctrl.target_speed - measured_speed;
    double integral = ctrl.integral_error + error * dt;
    double demand = gains.kp * error + gains.ki * integral;
    if (demand > torque_max || demand < torque_min) {
        // Anti-windup: freeze the integral while saturated.
        integral = ctrl.integral_error;
        demand = gains.kp * error + gains.ki * integral;
    }
    next.integral_error = integral;
    next.commanded_torque = std::clamp(demand, torque_min, torque_max);
    return next;
}

Simulator::Simulator(const VehicleParams& vp, const ContactParams& cp, const Obstacle& obstacle,
                     double dt)
    : vp_(vp), cp_(cp), obstacle_(obstacle), dt_(dt) {
    vp_.validate();
    cp_.validate();
    if (!(dt_ > 0.0)) throw ConfigError("solver.dt must be > 0");
    if (obstacle_.height < 0.0) throw ConfigError("obstacle.height must be >= 0");

    // Lumped axle: two wheels share the load, doubling penalty stiffness
    // and damping.
    axle_cp_ = cp_;
    axle_cp_.stiffness *= 2.0;
    axle_cp_.damping_max *= 2.0;

    // Reference static equilibrium (flat ground, symmetric load) pins the
    // attachment geometry: CoG at z_cog, wheel centers at wheel_radius
    // minus the static contact penetration.
    const double axle_load = (vp_.axle_mass + 0.5 * vp_.chassis_mass) * kGravity;
    static_penetration_ =
        std::pow(axle_load / axle_cp_.stiffness, 1.0 / axle_cp_.force_exponent);
    static_vertical_deflection_ = 0.5 * vp_.chassis_mass * kGravity / vp_.susp_stiffness;
    if (static_vertical_deflection_ >= vp_.vertical_stroke_limit)
        throw ConfigError("no static equilibrium within the vertical stroke limit");

    const double z_axle = vp_.wheel_radius - static_penetration_;
    const double z_att = z_axle - static_vertical_deflection_ + vp_.strut_length;
    att_front_local_ = Vec2{0.5 * vp_.wheelbase, z_att - vp_.z_cog};
    att_rear_local_ = Vec2{-0.5 * vp_.wheelbase, z_att - vp_.z_cog};
}

VehicleState Simulator::initialize_equilibrium(double target_speed) const {
    VehicleState s;
    const double z_axle = vp_.wheel_radius - static_penetration_;
    s.chassis_pos = Vec2{0.0, vp_.z_cog};
    s.chassis_vel = Vec2{target_speed, 0.0};
    s.front_axle_pos = Vec2{0.5 * vp_.wheelbase, z_axle};
    s.front_axle_vel = Vec2{target_speed, 0.0};
    s.rear_axle_z = z_axle;
    s.rear_axle_vz = 0.0;
    s.front_spin_rate = target_speed / vp_.wheel_radius;
    s.rear_spin_rate = s.front_spin_rate;
    return s;
}

double Simulator::endstop_force(double s, double limit) const {
    if (s > limit) return -vp_.endstop_stiffness * (s - limit);
    if (s < -limit) return -vp_.endstop_stiffness * (s + limit);
    return 0.0;
}

Vec2 Simulator::front_attachment(const VehicleState& s) const {
    return s.chassis_pos + rotate(s.pitch, att_front_local_);
}

Vec2 Simulator::rear_attachment(const VehicleState& s) const {
    return s.chassis_pos + rotate(s.pitch, att_rear_local_);
}

Vec2 Simulator::rear_axle_pos(const VehicleState& s) const {
    return Vec2{rear_attachment(s).x, s.rear_axle_z};
}

namespace {

struct AxleContact {
    Vec2 force{0.0, 0.0};
    double spin_torque = 0.0; // moment of the contact forces about the center
    double step_clearance = 1e9;
    double ground_clearance = 1e9;
    double slip = 0.0;
};

AxleContact axle_contact_forces(const Vec2& center, const Vec2& center_vel, double spin_rate,
                                double wheel_radius, const Obstacle& obs,
                                const ContactParams& cp) {
    AxleContact out;
    for (const ContactProbe& pr :
         probe_wheel_vs_step_all(center, wheel_radius, obs.height, obs.x)) {
        const double clearance = pr.separation - wheel_radius;
        if (pr.feature == SurfaceFeature::GroundPlane) {
            out.ground_clearance = std::min(out.ground_clearance, clearance);
        } else {
            out.step_clearance = std::min(out.step_clearance, clearance);
        }
        if (clearance >= 0.0) continue;
        // Material velocity of the wheel rim point at the contact.
        const Vec2 rim = Vec2{-pr.normal.z, pr.normal.x} * (spin_rate * wheel_radius);
        const Vec2 v_cp = center_vel + rim;
        const ContactForce f = contact_force(pr, wheel_radius, v_cp, cp);
        out.force += f.world_force;
        const Vec2 lever = pr.normal * (-wheel_radius);
        out.spin_torque += lever.cross(f.world_force);
        const double slip = v_cp.dot(pr.tangent);
        if (std::abs(slip) > std::abs(out.slip)) out.slip = slip;
    }
    return out;
}

} // namespace

ForceEval Simulator::assemble_forces(const VehicleState& s, double front_torque,
                                     double rear_torque) const {
    if (!std::isfinite(s.chassis_pos.x) || !std::isfinite(s.chassis_pos.z) ||
        !std::isfinite(s.pitch) || !std::isfinite(s.front_axle_pos.x) ||
        !std::isfinite(s.front_axle_pos.z) || !std::isfinite(s.rear_axle_z) ||
        !std::isfinite(s.chassis_vel.x) || !std::isfinite(s.chassis_vel.z) ||
        !std::isfinite(s.pitch_rate) || !std::isfinite(s.front_axle_vel.x) ||
        !std::isfinite(s.front_axle_vel.z) || !std::isfinite(s.rear_axle_vz) ||
        !std::isfinite(s.front_spin_rate) || !std::isfinite(s.rear_spin_rate))
        throw IntegrationError("non-finite state", s.t);

    ForceEval e;
    const double g = kGravity;
    const Vec2 neutral_drop{0.0, -vp_.strut_length};

    // Front suspension (2-DoF: longitudinal + vertical, world axes).
    const Vec2 att_f = front_attachment(s);
    const Vec2 att_f_vel =
        s.chassis_vel + rotate(s.pitch, att_front_local_).perp() * s.pitch_rate;
    const Vec2 defl_f = s.front_axle_pos - att_f - neutral_drop;
    const Vec2 defl_f_rate = s.front_axle_vel - att_f_vel;
    e.s_fx = defl_f.x;
    e.s_fz = defl_f.z;
    e.s_fx_rate = defl_f_rate.x;
    Vec2 spring_f;
    spring_f.x = -vp_.front_longitudinal_stiffness * defl_f.x -
                 vp_.front_longitudinal_damping * defl_f_rate.x +
                 endstop_force(defl_f.x, vp_.stroke_limit);
    spring_f.z = -vp_.susp_stiffness * defl_f.z - vp_.susp_vertical_damping * defl_f_rate.z +
                 endstop_force(defl_f.z, vp_.vertical_stroke_limit);

    // Rear suspension (1-DoF vertical; the rear wheel x is slaved to the
    // chassis, Susp-3D).
    const Vec2 att_r = rear_attachment(s);
    const Vec2 att_r_vel =
        s.chassis_vel + rotate(s.pitch, att_rear_local_).perp() * s.pitch_rate;
    e.s_rz = s.rear_axle_z - (att_r.z - vp_.strut_length);
    const double s_rz_rate = s.rear_axle_vz - att_r_vel.z;
    const double spring_rz = -vp_.susp_stiffness * e.s_rz -
                             vp_.susp_vertical_damping * s_rz_rate +
                             endstop_force(e.s_rz, vp_.vertical_stroke_limit);

    // Wheel-ground / wheel-step contact.
    const AxleContact cf = axle_contact_forces(s.front_axle_pos, s.front_axle_vel,
                                               s.front_spin_rate, vp_.wheel_radius,
                                               obstacle_, axle_cp_);
    const Vec2 rear_pos = rear_axle_pos(s);
    const Vec2 rear_vel{att_r_vel.x, s.rear_axle_vz};
    const AxleContact cr = axle_contact_forces(rear_pos, rear_vel, s.rear_spin_rate,
                                               vp_.wheel_radius, obstacle_, axle_cp_);

    e.front_step_clearance = cf.step_clearance;
    e.front_ground_clearance = cf.ground_clearance;
    e.rear_step_clearance = cr.step_clearance;
    e.rear_ground_clearance = cr.ground_clearance;
    e.front_slip = cf.slip;
    e.rear_slip = cr.slip;
    e.external_force = cf.force + cr.force;

    // Front axle: free planar point mass.
    e.f_front_x = cf.force.x + spring_f.x;
    e.f_front_z = cf.force.z + spring_f.z - vp_.axle_mass * g;

    // Rear axle: vertical DoF only; its horizontal contact force and
    // inertia are carried by the chassis.
    e.f_rear_z = cr.force.z + spring_rz - vp_.axle_mass * g;

    // Chassis.
    e.f_chassis_x = -spring_f.x + cr.force.x;
    e.f_chassis_z = -spring_f.z - spring_rz - vp_.chassis_mass * g;

    const Vec2 c = s.chassis_pos;
    e.torque_pitch = (att_f - c).cross(-spring_f) +
                     (att_r - c).cross(Vec2{0.0, -spring_rz}) +
                     (rear_pos - c).cross(Vec2{cr.force.x, 0.0}) +
                     front_torque + rear_torque;

    e.torque_front_spin = front_torque - cf.spin_torque;
    e.torque_rear_spin = rear_torque - cr.spin_torque;

    e.a_chassis_x = e.f_chassis_x / (vp_.chassis_mass + vp_.axle_mass);
    e.a_chassis_z = e.f_chassis_z / vp_.chassis_mass;
    e.a_pitch = e.torque_pitch / vp_.chassis_pitch_inertia;
    e.a_front_x = e.f_front_x / vp_.axle_mass;
    e.a_front_z = e.f_front_z / vp_.axle_mass;
    e.a_rear_z = e.f_rear_z / vp_.axle_mass;
    e.a_front_spin = e.torque_front_spin / vp_.wheel_spin_inertia;
    e.a_rear_spin = e.torque_rear_spin / vp_.wheel_spin_inertia;
    return e;
}

VehicleState Simulator::integrate_step(const VehicleState& s, double front_torque,
                                       double rear_torque) const {
    return integrate_step(s, dt_, front_torque, rear_torque);
}

VehicleState Simulator::integrate_step(const VehicleState& s, double dt, double front_torque,
                                       double rear_torque) const {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be > 0");
    return advance(s, assemble_forces(s, front_torque, rear_torque), dt);
}

VehicleState Simulator::advance(const VehicleState& s, const ForceEval& e, double dt) const {
    VehicleState n = s;
    n.chassis_vel.x += e.a_chassis_x * dt;
    n.chassis_vel.z += e.a_chassis_z * dt;
    n.pitch_rate += e.a_pitch * dt;
    n.front_axle_vel.x += e.a_front_x * dt;
    n.front_axle_vel.z += e.a_front_z * dt;
    n.rear_axle_vz += e.a_rear_z * dt;
    n.front_spin_rate += e.a_front_spin * dt;
    n.rear_spin_rate += e.a_rear_spin * dt;

    n.chassis_pos += n.chassis_vel * dt;
    n.pitch += n.pitch_rate * dt;
    n.front_axle_pos += n.front_axle_vel * dt;
    n.rear_axle_z += n.rear_axle_vz * dt;
    n.front_spin += n.front_spin_rate * dt;
    n.rear_spin += n.rear_spin_rate * dt;
    n.t += dt;

    const double bound = 1.0e6;
    const double mags[] = {n.chassis_pos.x, n.chassis_pos.z, n.pitch,
                           n.chassis_vel.x, n.chassis_vel.z, n.pitch_rate,
                           n.front_axle_pos.x, n.front_axle_pos.z,
                           n.front_axle_vel.x, n.front_axle_vel.z,
                           n.rear_axle_z, n.rear_axle_vz,
                           n.front_spin_rate, n.rear_spin_rate};
    for (double m : mags)
        if (!std::isfinite(m) || std::abs(m) > bound)
            throw IntegrationError("state divergence", n.t);
    return n;
}

double Simulator::kinetic_energy(const VehicleState& s) const {
    const Vec2 att_r_vel =
        s.chassis_vel + rotate(s.pitch, att_rear_local_).perp() * s.pitch_rate;
    const double rear_vx = att_r_vel.x;
    return 0.5 * vp_.chassis_mass * s.chassis_vel.dot(s.chassis_vel) +
           0.5 * vp_.chassis_pitch_inertia * s.pitch_rate * s.pitch_rate +
           0.5 * vp_.axle_mass * s.front_axle_vel.dot(s.front_axle_vel) +
           0.5 * vp_.axle_mass * (rear_vx * rear_vx + s.rear_axle_vz * s.rear_axle_vz) +
           0.5 * vp_.wheel_spin_inertia *
               (s.front_spin_rate * s.front_spin_rate + s.rear_spin_rate * s.rear_spin_rate);
}

double Simulator::chassis_kinetic_energy(const VehicleState& s) const {
    return 0.5 * vp_.chassis_mass * s.chassis_vel.dot(s.chassis_vel) +
           0.5 * vp_.chassis_pitch_inertia * s.pitch_rate * s.pitch_rate;
}

double Simulator::potential_energy(const VehicleState& s) const {
    const ForceEval e = assemble_forces(s, 0.0, 0.0);
    const double g = kGravity;
    double pe = vp_.chassis_mass * g * s.chassis_pos.z +
                vp_.axle_mass * g * s.front_axle_pos.z + vp_.axle_mass * g * s.rear_axle_z;
    pe += 0.5 * vp_.front_longitudinal_stiffness * e.s_fx * e.s_fx +
          0.5 * vp_.susp_stiffness * (e.s_fz * e.s_fz + e.s_rz * e.s_rz);
    auto over = [&](double sdefl, double limit) {
        const double x = std::max(std::abs(sdefl) - limit, 0.0);
        return 0.5 * vp_.endstop_stiffness * x * x;
    };
    pe += over(e.s_fx, vp_.stroke_limit) + over(e.s_fz, vp_.vertical_stroke_limit) +
          over(e.s_rz, vp_.vertical_stroke_limit);
    return pe;
}

} // namespace crossing_lab
