#include <doctest.h>

#include <cmath>

#include "crossing_lab/config.hpp"
#include "crossing_lab/export.hpp"
#include "crossing_lab/io.hpp"

using namespace crossing_lab;

TEST_CASE("defaults: published grid, 125 cells, stable hash") {
    const RunConfig c = RunConfig::defaults();
    CHECK(c.plan.cell_count() == 125);
    CHECK(c.workers == 1);
    CHECK_FALSE(c.config_hash.empty());
    CHECK(c.config_hash == RunConfig::defaults().config_hash);
}

TEST_CASE("minimal config only needs the schema version") {
    const RunConfig c = RunConfig::from_json_text(R"({"schema_version": 1})");
    CHECK(c.vehicle.wheel_radius == 0.0745);
    CHECK(c.contact.mu_dynamic == 0.95);
    CHECK(c.plan.cell_count() == 125);
}

TEST_CASE("schema version is required and checked") {
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text("{}"), doctest::Contains("schema_version"),
                         ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"schema_version": 2})"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text("not json"), ConfigError);
}

TEST_CASE("unknown keys are rejected with their field path") {
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(R"({"schema_version": 1, "vehicle": {"wheel_diameter_m": 0.1}})"),
        doctest::Contains("vehicle.wheel_diameter_m"), ConfigError);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(R"({"schema_version": 1, "extra_section": {}})"),
        doctest::Contains("extra_section"), ConfigError);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(R"({"schema_version": 1, "solver": {"dt": 1e-5}})"),
        doctest::Contains("solver.dt"), ConfigError);
}

TEST_CASE("paper units convert to SI at load time") {
    const RunConfig c = RunConfig::from_json_text(R"({
        "schema_version": 1,
        "vehicle": {"susp_stiffness_N_per_mm": 2.26},
        "contact": {
            "stiffness_N_per_mm": 1000.0,
            "force_exponent": 1.1,
            "damping_Ns_per_mm": 10.0,
            "penetration_depth_mm": 0.01,
            "stiction_transition_vel_mm_s": 1500.0,
            "friction_transition_vel_mm_s": 4000.0
        }
    })");
    CHECK(c.vehicle.susp_stiffness == doctest::Approx(2260.0).epsilon(1e-12));
    // Exponent-aware stiffness conversion: 1000 N/mm -> 1000 * 1000^1.1 N/m^e.
    CHECK(c.contact.stiffness ==
          doctest::Approx(1000.0 * std::pow(1000.0, 1.1)).epsilon(1e-12));
    CHECK(c.contact.damping_max == doctest::Approx(1.0e4).epsilon(1e-12));
    CHECK(c.contact.penetration_depth == doctest::Approx(1.0e-5).epsilon(1e-12));
    CHECK(c.contact.stiction_vel == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(c.contact.friction_vel == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("solver dt stability bound is enforced") {
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(R"({"schema_version": 1, "solver": {"dt_s": 5e-4}})"),
        doctest::Contains("dt_s"), ConfigError);
    const RunConfig ok =
        RunConfig::from_json_text(R"({"schema_version": 1, "solver": {"dt_s": 1e-5}})");
    CHECK(ok.solver.dt == 1e-5);
}

TEST_CASE("plan and paths sections override the defaults") {
    const RunConfig c = RunConfig::from_json_text(R"({
        "schema_version": 1,
        "plan": {"hO_levels_m": [0.02, 0.04], "vc_levels_mps": [3, 6], "cAV_levels_Nspm": [800]},
        "solver": {"workers": 4},
        "paths": {"output_dir": "results"}
    })");
    CHECK(c.plan.cell_count() == 4);
    CHECK(c.workers == 4);
    CHECK(c.output_dir == "results");
}

TEST_CASE("invalid physical values fail module validation") {
    CHECK_THROWS_AS(
        RunConfig::from_json_text(R"({"schema_version": 1, "vehicle": {"chassis_mass_kg": -5}})"),
        ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(
                        R"({"schema_version": 1, "plan": {"vc_levels_mps": [9, 3]}})"),
                    ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(
                        R"({"schema_version": 1, "vehicle": {"chassis_mass_kg": "heavy"}})"),
                    ConfigError);
}

TEST_CASE("loading a missing file names the path") {
    CHECK_THROWS_WITH_AS(RunConfig::load("/nonexistent/cfg.json"),
                         doctest::Contains("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("config hash distinguishes different inputs") {
    const RunConfig a = RunConfig::from_json_text(R"({"schema_version": 1})");
    const RunConfig b =
        RunConfig::from_json_text(R"({"schema_version": 1, "solver": {"workers": 2}})");
    CHECK(a.config_hash != b.config_hash);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.0, 1.0, -3.5, 0.0745, 1.0 / 3.0, 2.94352009326237, 1e-300, 6400.0}) {
        const std::string s = format_double(v);
        CHECK(parse_double(s, "test") == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK_THROWS_AS(parse_double("1.2.3", "test"), ParseError);
    CHECK_THROWS_AS(parse_double("", "test"), ParseError);
}

TEST_CASE("fnv1a digest is stable and input-sensitive") {
    CHECK(fnv1a_hex("") == fnv1a_hex(""));
    CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
    CHECK(fnv1a_hex("abc").size() == 16);
}

TEST_CASE("csv line splitting") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_csv_line("single") == std::vector<std::string>{"single"});
}

TEST_CASE("time series CSV uses the documented header and one row per sample") {
    TimeSeries ts;
    ts.obstacle_x = 2.0;
    ts.obstacle_height = 0.03;
    for (int i = 0; i < 3; ++i) {
        const double t = 0.1 * i;
        ts.t.push_back(t);
        ts.x_c.push_back(1.0 + t);
        ts.z_c.push_back(0.13);
        ts.theta.push_back(0.01);
        ts.v_x.push_back(3.0);
        ts.v_z.push_back(0.0);
        ts.theta_dot.push_back(0.0);
        ts.s_fx.push_back(-0.001);
        ts.s_fz.push_back(0.002);
        ts.s_rz.push_back(0.002);
        ts.tau.push_back(1.5);
        ts.E_c.push_back(60.0);
        ts.E_c_chassis.push_back(54.0);
        ts.front_x.push_back(1.2 + t);
        ts.rear_x.push_back(0.8 + t);
        ts.front_step_clearance.push_back(0.5);
        ts.front_ground_clearance.push_back(-1e-5);
        ts.rear_step_clearance.push_back(0.9);
        ts.rear_ground_clearance.push_back(-1e-5);
        ts.front_contact.push_back(1);
        ts.rear_contact.push_back(1);
    }
    const std::string csv = timeseries_to_csv(ts);
    CHECK(csv.rfind(kTimeSeriesCsvHeader, 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 rows
    CHECK(csv.find("1.5") != std::string::npos);
}

TEST_CASE("trial metrics JSON carries the documented fields") {
    TrialResult r;
    r.config = {0.0372, 6.0, 1600.0, {}};
    r.metrics.delta_Ec = 2.5;
    r.metrics.pitch_rate_t2 = -0.4;
    r.metrics.cdwo = 0.012;
    r.metrics.dx_w_max = 0.008;
    r.events.t1 = 0.31;
    r.events.t2 = 0.39;
    r.events.t3 = 0.44;
    r.outcome = Outcome::Cleared;
    const std::string j = trial_metrics_to_json(r);
    for (const char* key : {"hO", "vc", "cAV", "delta_Ec", "pitch_rate_t2", "cdwo", "dx_w_max",
                            "t1", "t2", "t3", "outcome"})
        CHECK(j.find(key) != std::string::npos);
    CHECK(j.find("cleared") != std::string::npos);
}
