#include "crossing_lab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crossing_lab {

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Cleared: return "cleared";
        case Outcome::Stalled: return "stalled";
        case Outcome::Tipped: return "tipped";
        case Outcome::RearContact: return "rear-contact";
        case Outcome::RearFlyover: return "rear-flyover";
        case Outcome::Failed: return "failed";
    }
    return "failed";
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "cleared") return Outcome::Cleared;
    if (s == "stalled") return Outcome::Stalled;
    if (s == "tipped") return Outcome::Tipped;
    if (s == "rear-contact") return Outcome::RearContact;
    if (s == "rear-flyover") return Outcome::RearFlyover;
    if (s == "failed") return Outcome::Failed;
    throw ParseError("unknown outcome '" + s + "'");
}

double TorqueSchedule::torque_at(double offset_from_t1, double hold_value) const {
    if (mode == Mode::HoldLast || entries.empty()) return hold_value;
    double torque = hold_value;
    for (const auto& [offset, value] : entries) {
        if (offset_from_t1 >= offset) torque = value;
        else break;
    }
    return torque;
}

namespace {

double interp_time(double t0, double t1, double y0, double y1) {
    if (y1 == y0) return t1;
    return t0 + (t1 - t0) * (0.0 - y0) / (y1 - y0);
}

// Time at which `x` crosses `target` between samples i-1 and i.
double crossing_time(const std::vector<double>& t, const std::vector<double>& x,
                     std::size_t i, double target) {
    if (i == 0) return t[0];
    return interp_time(t[i - 1], t[i], x[i - 1] - target, x[i] - target);
}

double interp_at(const std::vector<double>& t, const std::vector<double>& y, double tq) {
    const auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return y.front();
    if (it == t.end()) return y.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double u = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + u * (y[i] - y[i - 1]);
}

} // namespace

CrossingEvents detect_events(const TimeSeries& s) {
    if (s.size() < 2) throw NoCrossingError("time series too short");
    const double ox = s.obstacle_x;
    CrossingEvents ev;

    bool tipped = false;
    for (double th : s.theta)
        if (std::abs(th) > std::numbers::pi / 2.0) { tipped = true; break; }

    std::size_t i1 = 0;
    bool found_t1 = false;
    if (s.obstacle_height <= 0.0) {
        // Degenerate flat-ground trial: event times are the plane crossings.
        for (std::size_t i = 1; i < s.size(); ++i)
            if (s.front_x[i] >= ox && s.front_x[i - 1] < ox) {
                ev.t1 = crossing_time(s.t, s.front_x, i, ox);
                i1 = i;
                found_t1 = true;
                break;
            }
        if (!found_t1) throw NoCrossingError("front wheel never reached the obstacle plane");
        for (std::size_t i = i1; i < s.size(); ++i)
            if (s.rear_x[i] >= ox && s.rear_x[i - 1] < ox) {
                ev.t2 = crossing_time(s.t, s.rear_x, i, ox);
                ev.outcome = Outcome::Cleared;
                break;
            }
    } else {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.front_step_clearance[i] < 0.0) {
                ev.t1 = crossing_time(s.t, s.front_step_clearance, i, 0.0);
                i1 = i;
                found_t1 = true;
                break;
            }
        if (!found_t1) throw NoCrossingError("no front-wheel/step contact within the horizon");

        bool t2_found = false;
        for (std::size_t i = i1 + 1; i < s.size() && !t2_found; ++i) {
            const bool in_contact = s.rear_step_clearance[i] < 0.0;
            const bool was_in_contact = s.rear_step_clearance[i - 1] < 0.0;
            if (in_contact) ev.rear_touched = true;
            if (was_in_contact && !in_contact) {
                ev.t2 = interp_time(s.t[i - 1], s.t[i], s.rear_step_clearance[i - 1],
                                    s.rear_step_clearance[i]);
                t2_found = true;
                break;
            }
            // Rear-flyover: the rear wheel passes the step face while airborne.
            if (!in_contact && !was_in_contact && s.rear_x[i] >= ox && s.rear_x[i - 1] < ox &&
                s.rear_ground_clearance[i] >= 0.0) {
                ev.t2 = crossing_time(s.t, s.rear_x, i, ox);
                t2_found = true;
                ev.outcome = Outcome::RearFlyover;
                break;
            }
        }
        if (t2_found && ev.outcome != Outcome::RearFlyover) ev.outcome = Outcome::Cleared;
        if (!t2_found) ev.outcome = ev.rear_touched ? Outcome::RearContact : Outcome::Stalled;
    }

    if (ev.outcome == Outcome::Cleared || ev.outcome == Outcome::RearFlyover) {
        double zmax = -1e30;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.t[i] < ev.t2) continue;
            if (s.z_c[i] > zmax) { zmax = s.z_c[i]; ev.t3 = s.t[i]; }
        }
        if (ev.t3 < ev.t2) ev.t3 = ev.t2;
    }
    if (tipped) ev.outcome = Outcome::Tipped;
    return ev;
}

CrossingMetrics extract_metrics(const TimeSeries& s, const CrossingEvents& ev,
                                bool chassis_only_energy) {
    CrossingMetrics m;
    const std::vector<double>& ec = chassis_only_energy ? s.E_c_chassis : s.E_c;
    const double t_end = (ev.t2 > ev.t1) ? ev.t2 : s.t.back();

    double ec_min = 1e300, ec_max = -1e300;
    double min_speed = 1e300;
    double peak_shortening = 0.0;
    double t_peak = ev.t1;
    bool any_step_contact = false;
    bool any_sample = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.t[i] < ev.t1 || s.t[i] > t_end) continue;
        any_sample = true;
        ec_min = std::min(ec_min, ec[i]);
        ec_max = std::max(ec_max, ec[i]);
        min_speed = std::min(min_speed, s.v_x[i]);
        m.dx_w_max = std::max(m.dx_w_max, std::abs(s.s_fx[i]));
        const double shortening = -s.s_fx[i];
        if (shortening > peak_shortening) { peak_shortening = shortening; t_peak = s.t[i]; }
        if (s.front_step_clearance[i] < 0.0) {
            any_step_contact = true;
            if (i + 1 < s.size()) m.contact_duration += s.t[i + 1] - s.t[i];
        }
    }
    if (!any_sample) throw MetricError("empty crossing window");

    m.delta_Ec = ec_max - ec_min;
    m.min_speed = min_speed;
    m.pitch_rate_t2 = interp_at(s.t, s.theta_dot, t_end);
    m.cdwo = any_step_contact ? std::max(t_peak - ev.t1, 0.0) : 0.0;
    m.apex_height = (ev.t3 > 0.0) ? interp_at(s.t, s.z_c, ev.t3) : 0.0;
    if (!any_step_contact) m.contact_duration = 0.0;
    return m;
}

TrialResult run_trial(const VehicleParams& vehicle, const ContactParams& contact, double hO,
                      double vc, double cAV, const TorqueSchedule& schedule,
                      const SolverOptions& solver) {
    if (!(hO >= 0.0 && hO <= 1.5 * vehicle.wheel_radius))
        throw std::invalid_argument("run_trial: hO must be in [0, 1.5*wheel_radius]");
    if (!(vc > 0.0 && vc <= 20.0))
        throw std::invalid_argument("run_trial: vc must be in (0, 20] m/s");
    if (!(cAV > 0.0)) throw std::invalid_argument("run_trial: cAV must be > 0");

    VehicleParams vp = vehicle;
    vp.front_longitudinal_damping = cAV;
    const Obstacle obstacle{hO, solver.obstacle_x};
    const Simulator sim(vp, contact, obstacle, solver.dt);

    TrialResult r;
    r.config = TrialConfig{hO, vc, cAV, schedule};
    TimeSeries& ts = r.series;
    ts.obstacle_x = obstacle.x;
    ts.obstacle_height = obstacle.height;
    const std::size_t n_estimate =
        static_cast<std::size_t>(solver.horizon / solver.dt) + 2;
    auto reserve_all = [&](auto&... cols) { (cols.reserve(n_estimate), ...); };
    reserve_all(ts.t, ts.x_c, ts.z_c, ts.theta, ts.v_x, ts.v_z, ts.theta_dot, ts.s_fx, ts.s_fz,
                ts.s_rz, ts.tau, ts.E_c, ts.E_c_chassis, ts.front_x, ts.rear_x,
                ts.front_step_clearance, ts.front_ground_clearance, ts.rear_step_clearance,
                ts.rear_ground_clearance, ts.front_contact, ts.rear_contact);

    VehicleState state = sim.initialize_equilibrium(vc);
    ControllerState ctrl;
    ctrl.target_speed = vc;
    ctrl.mode = ControllerMode::SpeedHold;

    bool crossing_started = false;
    double t1_time = 0.0;
    double hold_torque = 0.0;
    bool tipped = false;
    bool rear_passed = false;
    double apex_z = -1e30;
    double apex_t = 0.0;

    try {
        while (state.t < solver.horizon) {
            double tau;
            if (!crossing_started) {
                ctrl = speed_controller_step(ctrl, state.chassis_vel.x, solver.dt,
                                             vp.torque_min, vp.torque_max);
                tau = ctrl.commanded_torque;
            } else {
                tau = std::clamp(schedule.torque_at(state.t - t1_time, hold_torque),
                                 vp.torque_min, vp.torque_max);
            }

            const ForceEval e = sim.assemble_forces(state, tau, tau);

            ts.t.push_back(state.t);
            ts.x_c.push_back(state.chassis_pos.x);
            ts.z_c.push_back(state.chassis_pos.z);
            ts.theta.push_back(state.pitch);
            ts.v_x.push_back(state.chassis_vel.x);
            ts.v_z.push_back(state.chassis_vel.z);
            ts.theta_dot.push_back(state.pitch_rate);
            ts.s_fx.push_back(e.s_fx);
            ts.s_fz.push_back(e.s_fz);
            ts.s_rz.push_back(e.s_rz);
            ts.tau.push_back(tau);
            ts.E_c.push_back(sim.kinetic_energy(state));
            ts.E_c_chassis.push_back(sim.chassis_kinetic_energy(state));
            ts.front_x.push_back(state.front_axle_pos.x);
            ts.rear_x.push_back(sim.rear_axle_pos(state).x);
            ts.front_step_clearance.push_back(e.front_step_clearance);
            ts.front_ground_clearance.push_back(e.front_ground_clearance);
            ts.rear_step_clearance.push_back(e.rear_step_clearance);
            ts.rear_ground_clearance.push_back(e.rear_ground_clearance);
            ts.front_contact.push_back(
                e.front_step_clearance < 0.0 || e.front_ground_clearance < 0.0 ? 1 : 0);
            ts.rear_contact.push_back(
                e.rear_step_clearance < 0.0 || e.rear_ground_clearance < 0.0 ? 1 : 0);

            if (!crossing_started) {
                const bool hit = (hO > 0.0) ? (e.front_step_clearance < 0.0)
                                            : (state.front_axle_pos.x >= obstacle.x);
                if (hit) {
                    crossing_started = true;
                    t1_time = state.t;
                    hold_torque = tau;
                    ctrl.mode = ControllerMode::TorqueHold;
                } else if (state.t > 0.1) {
                    r.max_abs_slip_steady = std::max(
                        r.max_abs_slip_steady,
                        std::max(std::abs(e.front_slip), std::abs(e.rear_slip)));
                    r.speed_error_before_t1 = std::max(r.speed_error_before_t1,
                                                       std::abs(state.chassis_vel.x - vc));
                }
            }

            state = sim.advance(state, e, solver.dt);

            if (std::abs(state.pitch) > std::numbers::pi / 2.0) { tipped = true; break; }

            if (crossing_started && !rear_passed &&
                sim.rear_axle_pos(state).x > obstacle.x + vp.wheel_radius)
                rear_passed = true;
            if (rear_passed) {
                if (state.chassis_pos.z > apex_z) { apex_z = state.chassis_pos.z; apex_t = state.t; }
                if (state.t - apex_t > solver.post_apex_time) break;
            }
        }
    } catch (const IntegrationError& err) {
        r.failed = true;
        r.diagnostic = err.what();
        r.outcome = Outcome::Failed;
        return r;
    }

    try {
        r.events = detect_events(ts);
        r.metrics = extract_metrics(ts, r.events, solver.chassis_only_energy);
        r.outcome = tipped ? Outcome::Tipped : r.events.outcome;
        if (tipped) r.events.outcome = Outcome::Tipped;
    } catch (const NoCrossingError& err) {
        r.failed = true;
        r.diagnostic = err.what();
        r.outcome = Outcome::Failed;
    } catch (const MetricError& err) {
        r.failed = true;
        r.diagnostic = err.what();
        r.outcome = Outcome::Failed;
    }
    return r;
}

} // namespace crossing_lab
