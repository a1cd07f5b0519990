#ifndef CROSSING_LAB_VEHICLE_HPP
#define CROSSING_LAB_VEHICLE_HPP

#include "crossing_lab/contact.hpp"
#include "crossing_lab/core.hpp"

namespace crossing_lab {

/// Planar (sagittal) vehicle parameters. Left/right wheels of an axle are
/// lumped into one body; contact stiffness and damping are doubled
/// accordingly inside the simulator. The datasheet gives only the wheel radius
/// (0.0745 m), the CoG height (0.13 m) and the suspension stiffness
/// (2.26 N/mm); every other default here is an engineering choice for a
/// small-scale RC-class vehicle and is configurable.
struct VehicleParams {
    double chassis_mass = 12.0;             // kg
    double chassis_pitch_inertia = 0.2276;  // kg*m^2, rectangular-plate estimate
    double axle_mass = 1.2;                 // kg per axle (both wheels)
    double wheel_spin_inertia = 3.33e-3;    // kg*m^2 per axle
    double wheel_radius = 0.0745;           // m
    double wheelbase = 0.40;                // m
    double z_cog = 0.13;                    // m
    double susp_stiffness = 2260.0;         // N/m, vertical struts
    double front_longitudinal_stiffness = 1.0e5; // N/m, front x-compliance
    double susp_vertical_damping = 58.2;    // N*s/m, ~0.25 critical for the sprung share
    double front_longitudinal_damping = 1600.0; // c_AV, N*s/m
    double stroke_limit = 0.05;             // longitudinal, m, symmetric about neutral
    double vertical_stroke_limit = 0.08;    // m
    double torque_min = -8.0;               // N*m per axle
    double torque_max = 8.0;
    double endstop_stiffness = 2.0e5;       // N/m
    double strut_length = 0.06;             // neutral wheel-center drop below attachment, m

    void validate() const;
};

struct VehicleState {
    double t = 0.0;
    Vec2 chassis_pos{0.0, 0.0};   // CoG, world
    double pitch = 0.0;           // rad, nose-up positive
    Vec2 chassis_vel{0.0, 0.0};
    double pitch_rate = 0.0;
    Vec2 front_axle_pos{0.0, 0.0}; // wheel center, world
    Vec2 front_axle_vel{0.0, 0.0};
    double rear_axle_z = 0.0;      // wheel center height, world (x is slaved to chassis)
    double rear_axle_vz = 0.0;
    double front_spin = 0.0;       // rad, positive = rolling forward
    double front_spin_rate = 0.0;  // rad/s
    double rear_spin = 0.0;
    double rear_spin_rate = 0.0;
};

enum class ControllerMode { SpeedHold, TorqueHold, CrossingCommand };

struct ControllerGains {
    double kp = 6.0;  // N*m per m/s
    double ki = 40.0; // N*m per m
};

struct ControllerState {
    double target_speed = 0.0;
    double integral_error = 0.0;
    double commanded_torque = 0.0;
    ControllerMode mode = ControllerMode::SpeedHold;
};

/// PI speed-hold with anti-windup; pass-through in the other modes.
ControllerState speed_controller_step(const ControllerState& ctrl, double measured_speed,
                                      double dt, double torque_min, double torque_max,
                                      const ControllerGains& gains = {});

struct Obstacle {
    double height = 0.0; // m, 0 = flat ground
    double x = 2.0;      // step face position, m
};

/// Per-evaluation force assembly output: generalized forces, the resulting
/// accelerations, and the diagnostics the scenario layer samples each step.
struct ForceEval {
    // Generalized forces (chassis x, chassis z, pitch torque, front axle
    // x/z, rear axle z, spin torques).
    double f_chassis_x = 0.0, f_chassis_z = 0.0, torque_pitch = 0.0;
    double f_front_x = 0.0, f_front_z = 0.0, f_rear_z = 0.0;
    double torque_front_spin = 0.0, torque_rear_spin = 0.0;
    // Accelerations for the same DoF.
    double a_chassis_x = 0.0, a_chassis_z = 0.0, a_pitch = 0.0;
    double a_front_x = 0.0, a_front_z = 0.0, a_rear_z = 0.0;
    double a_front_spin = 0.0, a_rear_spin = 0.0;
    // Suspension deflections (world axes, relative to neutral).
    double s_fx = 0.0, s_fz = 0.0, s_rz = 0.0;
    double s_fx_rate = 0.0;
    // Signed clearances: separation minus wheel radius (< 0 means contact).
    double front_step_clearance = 1e9, front_ground_clearance = 1e9;
    double rear_step_clearance = 1e9, rear_ground_clearance = 1e9;
    // Contact-point slip speeds (largest magnitude over active contacts).
    double front_slip = 0.0, rear_slip = 0.0;
    // Sum of external (contact) forces, for momentum audits.
    Vec2 external_force{0.0, 0.0};
};

class Simulator {
public:
    Simulator(const VehicleParams& vp, const ContactParams& cp, const Obstacle& obstacle,
              double dt = 2.0e-5);

    /// Static rest state on flat ground at the given forward speed, wheels
    /// spinning at the rolling-without-slipping rate.
    VehicleState initialize_equilibrium(double target_speed) const;

    ForceEval assemble_forces(const VehicleState& s, double front_torque,
                              double rear_torque) const;

    /// One fixed-step semi-implicit Euler step. Deterministic; throws
    /// IntegrationError on divergence.
    VehicleState integrate_step(const VehicleState& s, double front_torque,
                                double rear_torque) const;
    VehicleState integrate_step(const VehicleState& s, double dt, double front_torque,
                                double rear_torque) const;

    /// Advance with a force evaluation already in hand (lets callers record
    /// diagnostics without assembling twice).
    VehicleState advance(const VehicleState& s, const ForceEval& e, double dt) const;

    double kinetic_energy(const VehicleState& s) const;
    double chassis_kinetic_energy(const VehicleState& s) const;
    /// Gravity + suspension-spring potential (contact elastic energy
    /// excluded); used by the conservation audits.
    double potential_energy(const VehicleState& s) const;

    Vec2 rear_axle_pos(const VehicleState& s) const;
    Vec2 front_attachment(const VehicleState& s) const;
    Vec2 rear_attachment(const VehicleState& s) const;

    double dt() const { return dt_; }
    const VehicleParams& vehicle() const { return vp_; }
    const ContactParams& axle_contact() const { return axle_cp_; }
    const Obstacle& obstacle() const { return obstacle_; }

private:
    VehicleParams vp_;
    ContactParams cp_;       // per-wheel parameters as configured
    ContactParams axle_cp_;  // lumped per-axle (stiffness and damping doubled)
    Obstacle obstacle_;
    double dt_;
    // Attachment points in the chassis frame, derived so the reference
    // static equilibrium puts the CoG at z_cog with wheels at wheel_radius.
    Vec2 att_front_local_{0.0, 0.0};
    Vec2 att_rear_local_{0.0, 0.0};
    double static_vertical_deflection_ = 0.0;
    double static_penetration_ = 0.0;

    double endstop_force(double s, double limit) const;
};

} // namespace crossing_lab

#endif
