#ifndef CROSSING_LAB_SCENARIO_HPP
#define CROSSING_LAB_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crossing_lab/vehicle.hpp"

namespace crossing_lab {

enum class Outcome { Cleared, Stalled, Tipped, RearContact, RearFlyover, Failed };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

/// t1: first front-wheel/step contact. t2: end of crossing (rear contact
/// ends, or the rear wheel passes the step face airborne). t3: apex of the
/// chassis trajectory after t2.
struct CrossingEvents {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    Outcome outcome = Outcome::Stalled;
    bool rear_touched = false;
};

struct CrossingMetrics {
    double delta_Ec = 0.0;       // J, max - min kinetic energy over [t1, t2]
    double pitch_rate_t2 = 0.0;  // rad/s
    double cdwo = 0.0;           // s, t1 -> maximum longitudinal shortening
    double dx_w_max = 0.0;       // m, max |s_fx| over [t1, t2]
    double min_speed = 0.0;      // m/s over [t1, t2]
    double apex_height = 0.0;    // m, z_c at t3
    double contact_duration = 0.0; // s, raw front-step contact time in [t1, t2]
};

struct TorqueSchedule {
    enum class Mode { HoldLast, Scheduled };
    Mode mode = Mode::HoldLast;
    /// Piecewise-constant torque vs time offset from t1 (sorted by offset).
    std::vector<std::pair<double, double>> entries;

    double torque_at(double offset_from_t1, double hold_value) const;
};

struct SolverOptions {
    double dt = 2.0e-5;      // s; stability bound documented in the README
    double horizon = 3.0;    // s
    double obstacle_x = 2.0; // m, step face position
    double post_apex_time = 1.0; // s simulated past the apex before stopping
    bool chassis_only_energy = false; // delta_Ec from chassis KE instead of total
};

/// Column-oriented trial time series. The CSV export writes the documented
/// subset; the extra channels feed event detection and the test oracles.
struct TimeSeries {
    std::vector<double> t, x_c, z_c, theta, v_x, v_z, theta_dot;
    std::vector<double> s_fx, s_fz, s_rz, tau, E_c, E_c_chassis;
    std::vector<double> front_x, rear_x;
    std::vector<double> front_step_clearance, front_ground_clearance;
    std::vector<double> rear_step_clearance, rear_ground_clearance;
    std::vector<std::uint8_t> front_contact, rear_contact;
    double obstacle_x = 0.0;
    double obstacle_height = 0.0;

    std::size_t size() const { return t.size(); }
};

struct TrialConfig {
    double hO = 0.0;   // m
    double vc = 0.0;   // m/s
    double cAV = 0.0;  // N*s/m
    TorqueSchedule schedule;
};

struct TrialResult {
    TrialConfig config;
    TimeSeries series;
    CrossingEvents events;
    CrossingMetrics metrics;
    Outcome outcome = Outcome::Failed;
    bool failed = false;
    std::string diagnostic;
    double max_abs_slip_steady = 0.0; // approach-phase slip audit
    double speed_error_before_t1 = 0.0; // max |v_x - vc| over the settled approach
};

class NoCrossingError : public std::runtime_error {
public:
    explicit NoCrossingError(const std::string& what) : std::runtime_error(what) {}
};

class MetricError : public std::runtime_error {
public:
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

/// Simulates one crossing end to end: speed-hold approach until t1, then
/// held or scheduled torque, then the ballistic/landing phase until the
/// chassis settles back on the ground or the horizon expires.
TrialResult run_trial(const VehicleParams& vehicle, const ContactParams& contact, double hO,
                      double vc, double cAV, const TorqueSchedule& schedule = {},
                      const SolverOptions& solver = {});

/// Event times linearly interpolated between samples. Throws
/// NoCrossingError when the front wheel never reaches the step.
CrossingEvents detect_events(const TimeSeries& series);

CrossingMetrics extract_metrics(const TimeSeries& series, const CrossingEvents& events,
                                bool chassis_only_energy = false);

} // namespace crossing_lab

#endif
