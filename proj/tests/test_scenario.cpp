#include <doctest.h>

#include <cmath>

#include "crossing_lab/scenario.hpp"

using namespace crossing_lab;

namespace {

// Synthetic series builder: every channel defaulted to an out-of-contact,
// level cruise so fixtures only specify what they test.
struct SeriesBuilder {
    TimeSeries s;

    SeriesBuilder() {
        s.obstacle_x = 2.0;
        s.obstacle_height = 0.05;
    }

    void add(double t, double front_step_cl, double rear_step_cl, double z_c = 0.13,
             double theta = 0.0, double s_fx = 0.0, double E_c = 100.0,
             double theta_dot = 0.0, double rear_ground_cl = -1e-4, double rear_x = 0.0) {
        s.t.push_back(t);
        s.x_c.push_back(t);
        s.z_c.push_back(z_c);
        s.theta.push_back(theta);
        s.v_x.push_back(1.0);
        s.v_z.push_back(0.0);
        s.theta_dot.push_back(theta_dot);
        s.s_fx.push_back(s_fx);
        s.s_fz.push_back(0.0);
        s.s_rz.push_back(0.0);
        s.tau.push_back(0.0);
        s.E_c.push_back(E_c);
        s.E_c_chassis.push_back(E_c);
        s.front_x.push_back(t + 0.2);
        s.rear_x.push_back(rear_x == 0.0 ? t - 0.2 : rear_x);
        s.front_step_clearance.push_back(front_step_cl);
        s.front_ground_clearance.push_back(-1e-4);
        s.rear_step_clearance.push_back(rear_step_cl);
        s.rear_ground_clearance.push_back(rear_ground_cl);
        s.front_contact.push_back(front_step_cl < 0.0 ? 1 : 0);
        s.rear_contact.push_back(rear_step_cl < 0.0 ? 1 : 0);
    }
};

} // namespace

TEST_CASE("torque schedule: hold-last and piecewise lookup") {
    TorqueSchedule hold;
    CHECK(hold.torque_at(0.5, 3.0) == 3.0);

    TorqueSchedule sched;
    sched.mode = TorqueSchedule::Mode::Scheduled;
    sched.entries = {{0.0, 2.0}, {0.1, 5.0}, {0.3, -1.0}};
    CHECK(sched.torque_at(-0.05, 3.0) == 3.0); // before the first entry
    CHECK(sched.torque_at(0.0, 3.0) == 2.0);
    CHECK(sched.torque_at(0.05, 3.0) == 2.0);
    CHECK(sched.torque_at(0.1, 3.0) == 5.0);
    CHECK(sched.torque_at(0.2999, 3.0) == 5.0);
    CHECK(sched.torque_at(4.0, 3.0) == -1.0);
}

TEST_CASE("event detection interpolates t1 and t2 on a synthetic fixture") {
    SeriesBuilder b;
    b.add(0.9, 0.5, 0.5);
    b.add(1.0, 0.5, 0.5);
    b.add(1.1, -0.5, 0.5); // front contact begins: zero-crossing at 1.05
    b.add(1.5, -0.2, 0.5);
    b.add(2.0, 0.3, -0.2); // rear in contact
    b.add(2.2, 0.3, 0.2);  // rear leaves: zero-crossing at 2.1
    b.add(2.4, 0.3, 0.4, 0.18);
    b.add(2.6, 0.3, 0.5, 0.16);
    const CrossingEvents ev = detect_events(b.s);
    CHECK(ev.t1 == doctest::Approx(1.05).epsilon(1e-12));
    CHECK(ev.t2 == doctest::Approx(2.1).epsilon(1e-12));
    CHECK(ev.t3 == doctest::Approx(2.4).epsilon(1e-12)); // apex after t2
    CHECK(ev.outcome == Outcome::Cleared);
    CHECK(ev.rear_touched);
}

TEST_CASE("event detection: stalled, rear-contact, rear-flyover, tipped") {
    SeriesBuilder stalled;
    stalled.add(0.0, 0.5, 0.5);
    stalled.add(1.0, -0.1, 0.5);
    stalled.add(2.0, -0.1, 0.5);
    CHECK(detect_events(stalled.s).outcome == Outcome::Stalled);

    SeriesBuilder rc;
    rc.add(0.0, 0.5, 0.5);
    rc.add(1.0, -0.1, 0.5);
    rc.add(2.0, -0.1, -0.1); // rear touches and never leaves
    rc.add(3.0, -0.1, -0.1);
    CHECK(detect_events(rc.s).outcome == Outcome::RearContact);

    SeriesBuilder fly; // rear passes the face plane airborne
    fly.add(0.0, 0.5, 0.5, 0.13, 0.0, 0.0, 100.0, 0.0, 0.3, 1.0);
    fly.add(1.0, -0.1, 0.5, 0.13, 0.0, 0.0, 100.0, 0.0, 0.3, 1.5);
    fly.add(2.0, 0.2, 0.5, 0.13, 0.0, 0.0, 100.0, 0.0, 0.3, 1.9);
    fly.add(3.0, 0.2, 0.5, 0.13, 0.0, 0.0, 100.0, 0.0, 0.3, 2.3);
    const CrossingEvents fev = detect_events(fly.s);
    CHECK(fev.outcome == Outcome::RearFlyover);
    CHECK(fev.t2 == doctest::Approx(2.25).epsilon(1e-9)); // rear_x hits 2.0

    SeriesBuilder tipped;
    tipped.add(0.0, 0.5, 0.5);
    tipped.add(1.0, -0.1, 0.5);
    tipped.add(2.0, -0.1, 0.5, 0.13, 2.0); // |theta| > pi/2
    CHECK(detect_events(tipped.s).outcome == Outcome::Tipped);
}

TEST_CASE("detect_events throws when the step is never reached") {
    SeriesBuilder b;
    b.add(0.0, 0.5, 0.5);
    b.add(1.0, 0.4, 0.5);
    CHECK_THROWS_AS(detect_events(b.s), NoCrossingError);
}

TEST_CASE("CDWO and dx_w_max from a synthetic deflection profile") {
    SeriesBuilder b;
    b.add(1.0, 0.5, 0.5);
    b.add(1.1, -0.1, 0.5, 0.13, 0.0, -0.004); // t1 interpolates to 1.05
    b.add(1.3, -0.1, 0.5, 0.13, 0.0, -0.012); // max shortening here
    b.add(1.5, -0.1, 0.5, 0.13, 0.0, -0.006);
    b.add(1.8, 0.2, -0.1, 0.13, 0.0, 0.002);
    b.add(2.0, 0.2, 0.1, 0.13, 0.0, 0.0); // t2 = 1.9
    const CrossingEvents ev = detect_events(b.s);
    const CrossingMetrics m = extract_metrics(b.s, ev);
    CHECK(m.cdwo == doctest::Approx(1.3 - ev.t1).epsilon(1e-12));
    CHECK(m.dx_w_max == doctest::Approx(0.012).epsilon(1e-12));
}

TEST_CASE("delta_Ec is invariant to a constant energy datum shift") {
    SeriesBuilder b;
    b.add(1.0, 0.5, 0.5, 0.13, 0.0, 0.0, 50.0);
    b.add(1.2, -0.1, 0.5, 0.13, 0.0, 0.0, 44.0);
    b.add(1.6, -0.1, -0.1, 0.13, 0.0, 0.0, 41.0);
    b.add(2.0, 0.2, 0.1, 0.13, 0.0, 0.0, 48.0);
    const CrossingEvents ev = detect_events(b.s);
    const double d0 = extract_metrics(b.s, ev).delta_Ec;
    for (double& e : b.s.E_c) e += 123.456;
    const double d1 = extract_metrics(b.s, ev).delta_Ec;
    CHECK(d0 == doctest::Approx(d1).epsilon(1e-12));
    // Window is [t1, t2] = [1.1667, 1.8]; only the 44 J and 41 J samples count.
    CHECK(d0 == doctest::Approx(44.0 - 41.0).epsilon(1e-9));
}

TEST_CASE("run_trial rejects out-of-envelope parameters") {
    const VehicleParams vp;
    const ContactParams cp;
    CHECK_THROWS_AS(run_trial(vp, cp, -0.01, 3.0, 1600.0), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(vp, cp, 0.2, 3.0, 1600.0), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(vp, cp, 0.02, 0.0, 1600.0), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(vp, cp, 0.02, 25.0, 1600.0), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(vp, cp, 0.02, 3.0, 0.0), std::invalid_argument);
}

TEST_CASE("degenerate flat-ground trial: plane-crossing events, zero CDWO") {
    const TrialResult r = run_trial(VehicleParams{}, ContactParams{}, 0.0, 3.0, 1600.0);
    REQUIRE_FALSE(r.failed);
    CHECK(r.outcome == Outcome::Cleared);
    // Front wheel starts at +wheelbase/2 and must travel to x = 2 at ~3 m/s.
    CHECK(r.events.t1 == doctest::Approx((2.0 - 0.2) / 3.0).epsilon(0.02));
    // Rear wheel trails by one wheelbase.
    CHECK(r.events.t2 - r.events.t1 == doctest::Approx(0.4 / 3.0).epsilon(0.02));
    CHECK(r.metrics.cdwo == 0.0);
    CHECK(r.metrics.contact_duration == 0.0);
}

TEST_CASE("low step at moderate speed crosses and orders t1 < t2 <= t3") {
    SolverOptions solver;
    const double hO = 0.25 * 0.0745;
    const TrialResult r = run_trial(VehicleParams{}, ContactParams{}, hO, 3.0, 1600.0, {}, solver);
    REQUIRE_FALSE(r.failed);
    const bool crossed = r.outcome == Outcome::Cleared || r.outcome == Outcome::RearFlyover;
    CHECK(crossed);
    CHECK(r.events.t1 > 0.0);
    CHECK(r.events.t2 > r.events.t1);
    CHECK(r.events.t3 >= r.events.t2);
    CHECK(r.metrics.delta_Ec > 0.0);
    CHECK(r.metrics.dx_w_max > 0.0);
    CHECK(r.metrics.cdwo >= 0.0);
    // Speed-hold regulation during the settled approach.
    CHECK(r.speed_error_before_t1 < 0.03);
}

TEST_CASE("t1 shifts by exactly the extra approach distance over speed") {
    SolverOptions near;
    near.obstacle_x = 2.0;
    SolverOptions far = near;
    far.obstacle_x = 2.5;
    const double hO = 0.5 * 0.0745;
    const double vc = 3.0;
    const TrialResult a = run_trial(VehicleParams{}, ContactParams{}, hO, vc, 1600.0, {}, near);
    const TrialResult b = run_trial(VehicleParams{}, ContactParams{}, hO, vc, 1600.0, {}, far);
    REQUIRE_FALSE(a.failed);
    REQUIRE_FALSE(b.failed);
    CHECK(b.events.t1 - a.events.t1 == doctest::Approx(0.5 / vc).epsilon(0.01));
    // Same crossing physics regardless of where the step sits.
    CHECK(b.metrics.delta_Ec == doctest::Approx(a.metrics.delta_Ec).epsilon(0.02));
    CHECK(b.metrics.dx_w_max == doctest::Approx(a.metrics.dx_w_max).epsilon(0.02));
}

TEST_CASE("metrics agree with an independent recomputation from the series") {
    const double hO = 0.5 * 0.0745;
    const TrialResult r = run_trial(VehicleParams{}, ContactParams{}, hO, 6.0, 1600.0);
    REQUIRE_FALSE(r.failed);
    const TimeSeries& s = r.series;
    const double t_end = (r.events.t2 > r.events.t1) ? r.events.t2 : s.t.back();
    double emin = 1e300, emax = -1e300, dxw = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.t[i] < r.events.t1 || s.t[i] > t_end) continue;
        emin = std::min(emin, s.E_c[i]);
        emax = std::max(emax, s.E_c[i]);
        dxw = std::max(dxw, std::abs(s.s_fx[i]));
    }
    CHECK(r.metrics.delta_Ec == doctest::Approx(emax - emin).epsilon(1e-12));
    CHECK(r.metrics.dx_w_max == doctest::Approx(dxw).epsilon(1e-12));
}

TEST_CASE("outcome round-trips through its string form") {
    for (Outcome o : {Outcome::Cleared, Outcome::Stalled, Outcome::Tipped, Outcome::RearContact,
                      Outcome::RearFlyover, Outcome::Failed})
        CHECK(outcome_from_string(to_string(o)) == o);
    CHECK_THROWS_AS(outcome_from_string("bogus"), ParseError);
}
