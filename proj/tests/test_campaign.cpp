#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "crossing_lab/campaign.hpp"
#include "crossing_lab/io.hpp"

using namespace crossing_lab;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / name).string();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path(temp_path(name)) {}
    ~TempFile() {
        std::remove(path.c_str());
        std::remove((path + ".meta.json").c_str());
    }
};

SolverOptions coarse_solver() {
    SolverOptions s;
    s.dt = 5.0e-5; // coarse but stable; these tests check plumbing, not physics
    return s;
}

} // namespace

TEST_CASE("default plan is the published 5 x 5 x 5 grid") {
    const DoePlan p = DoePlan::defaults();
    CHECK(p.cell_count() == 125);
    REQUIRE(p.hO_levels.size() == 5);
    CHECK(p.hO_levels[0] == doctest::Approx(0.25 * 0.0745));
    CHECK(p.hO_levels[4] == doctest::Approx(0.0745));
    CHECK(p.vc_levels == std::vector<double>{3.0, 6.0, 9.0, 12.0, 15.0});
    CHECK(p.cAV_levels == std::vector<double>{400.0, 800.0, 1600.0, 3200.0, 6400.0});
    p.validate(0.0745);
}

TEST_CASE("plan validation rejects malformed grids") {
    DoePlan p = DoePlan::defaults();
    p.vc_levels.clear();
    CHECK_THROWS_AS(p.validate(0.0745), ConfigError);

    p = DoePlan::defaults();
    p.cAV_levels = {800.0, 400.0};
    CHECK_THROWS_AS(p.validate(0.0745), ConfigError);

    p = DoePlan::defaults();
    p.hO_levels.push_back(0.2); // beyond 1.5 * wheel_radius
    CHECK_THROWS_AS(p.validate(0.0745), ConfigError);

    p = DoePlan::defaults();
    p.replicate_count = 0;
    CHECK_THROWS_AS(p.validate(0.0745), ConfigError);

    p = DoePlan::defaults();
    p.vc_levels = {3.0, 25.0};
    CHECK_THROWS_AS(p.validate(0.0745), ConfigError);
}

TEST_CASE("record_order is lexicographic in (hO, vc, cAV)") {
    TrialRecord a, b;
    a.hO = 0.01; b.hO = 0.02;
    CHECK(record_order(a, b));
    a.hO = b.hO = 0.01;
    a.vc = 3.0; b.vc = 6.0;
    CHECK(record_order(a, b));
    a.vc = b.vc = 3.0;
    a.cAV = 400.0; b.cAV = 800.0;
    CHECK(record_order(a, b));
    b.cAV = 400.0;
    CHECK_FALSE(record_order(a, b));
    CHECK_FALSE(record_order(b, a));
}

TEST_CASE("single-cell campaign reproduces a direct trial bit for bit") {
    DoePlan plan;
    plan.hO_levels = {0.5 * 0.0745};
    plan.vc_levels = {6.0};
    plan.cAV_levels = {1600.0};
    const SolverOptions solver = coarse_solver();

    const CampaignResult c =
        run_campaign(plan, VehicleParams{}, ContactParams{}, 1, solver, "h");
    REQUIRE(c.records.size() == 1);
    CHECK(c.failures.empty());
    CHECK(c.config_hash == "h");

    const TrialResult direct =
        run_trial(VehicleParams{}, ContactParams{}, plan.hO_levels[0], 6.0, 1600.0, {}, solver);
    CHECK(c.records[0].delta_Ec == direct.metrics.delta_Ec);
    CHECK(c.records[0].pitch_rate_t2 == direct.metrics.pitch_rate_t2);
    CHECK(c.records[0].cdwo == direct.metrics.cdwo);
    CHECK(c.records[0].dx_w_max == direct.metrics.dx_w_max);
    CHECK(c.records[0].t1 == direct.events.t1);
    CHECK(c.records[0].t2 == direct.events.t2);
    CHECK(c.records[0].outcome == direct.outcome);
}

TEST_CASE("worker count does not change the persisted bytes") {
    DoePlan plan;
    plan.hO_levels = {0.25 * 0.0745, 0.5 * 0.0745};
    plan.vc_levels = {3.0, 6.0};
    plan.cAV_levels = {800.0, 3200.0};
    const SolverOptions solver = coarse_solver();

    const CampaignResult serial =
        run_campaign(plan, VehicleParams{}, ContactParams{}, 1, solver, "hash");
    const CampaignResult parallel =
        run_campaign(plan, VehicleParams{}, ContactParams{}, 4, solver, "hash");

    TempFile a("cl_campaign_w1.csv"), b("cl_campaign_w4.csv");
    save_campaign(serial, a.path);
    save_campaign(parallel, b.path);
    CHECK(read_text_file(a.path) == read_text_file(b.path));
    CHECK(read_text_file(a.path + ".meta.json") == read_text_file(b.path + ".meta.json"));
    CHECK(serial.records.size() + serial.failures.size() == plan.cell_count());
}

TEST_CASE("a too-short horizon lands cells in the failure list") {
    DoePlan plan;
    plan.hO_levels = {0.5 * 0.0745};
    plan.vc_levels = {3.0};
    plan.cAV_levels = {1600.0};
    SolverOptions solver = coarse_solver();
    solver.horizon = 0.05; // front wheel cannot reach the step in time
    const CampaignResult c = run_campaign(plan, VehicleParams{}, ContactParams{}, 1, solver);
    CHECK(c.records.empty());
    REQUIRE(c.failures.size() == 1);
    CHECK(c.failures[0].hO == plan.hO_levels[0]);
    CHECK_FALSE(c.failures[0].diagnostic.empty());
}

TEST_CASE("campaign CSV round-trips exactly, including the sidecar") {
    DoePlan plan;
    plan.hO_levels = {0.25 * 0.0745};
    plan.vc_levels = {3.0, 6.0};
    plan.cAV_levels = {800.0};
    const CampaignResult c =
        run_campaign(plan, VehicleParams{}, ContactParams{}, 2, coarse_solver(), "abc123");

    TempFile f("cl_roundtrip.csv");
    save_campaign(c, f.path);
    const CampaignResult back = load_campaign(f.path);
    REQUIRE(back.records.size() == c.records.size());
    for (std::size_t i = 0; i < c.records.size(); ++i) {
        CHECK(back.records[i].hO == c.records[i].hO);
        CHECK(back.records[i].vc == c.records[i].vc);
        CHECK(back.records[i].cAV == c.records[i].cAV);
        CHECK(back.records[i].delta_Ec == c.records[i].delta_Ec);
        CHECK(back.records[i].pitch_rate_t2 == c.records[i].pitch_rate_t2);
        CHECK(back.records[i].cdwo == c.records[i].cdwo);
        CHECK(back.records[i].dx_w_max == c.records[i].dx_w_max);
        CHECK(back.records[i].t1 == c.records[i].t1);
        CHECK(back.records[i].t2 == c.records[i].t2);
        CHECK(back.records[i].t3 == c.records[i].t3);
        CHECK(back.records[i].outcome == c.records[i].outcome);
    }
    CHECK(back.plan.hO_levels == c.plan.hO_levels);
    CHECK(back.plan.vc_levels == c.plan.vc_levels);
    CHECK(back.plan.cAV_levels == c.plan.cAV_levels);
    CHECK(back.config_hash == "abc123");
}

TEST_CASE("loader reports a missing column by name") {
    TempFile f("cl_missing_col.csv");
    write_text_file(f.path,
                    "hO_m,vc_mps,cAV_Nspm,delta_Ec_J,pitch_rate_t2_radps,dx_w_max_m,"
                    "t1_s,t2_s,t3_s,outcome\n");
    CHECK_THROWS_WITH_AS(load_campaign(f.path), doctest::Contains("cdwo_s"), ParseError);
}

TEST_CASE("loader rejects reordered or extra header columns") {
    TempFile f("cl_reordered.csv");
    write_text_file(f.path,
                    "vc_mps,hO_m,cAV_Nspm,delta_Ec_J,pitch_rate_t2_radps,cdwo_s,dx_w_max_m,"
                    "t1_s,t2_s,t3_s,outcome\n");
    CHECK_THROWS_AS(load_campaign(f.path), ParseError);

    TempFile g("cl_extra.csv");
    write_text_file(g.path, std::string(kCampaignCsvHeader) + ",extra\n");
    CHECK_THROWS_AS(load_campaign(g.path), ParseError);
}

TEST_CASE("loader names the offending line on bad fields") {
    TempFile f("cl_badfield.csv");
    write_text_file(f.path, std::string(kCampaignCsvHeader) +
                                "\n0.01,3,400,1.5,0.2,0.01,0.02,0.5,0.6,0.7,cleared\n"
                                "0.01,3,800,oops,0.2,0.01,0.02,0.5,0.6,0.7,cleared\n");
    CHECK_THROWS_WITH_AS(load_campaign(f.path), doctest::Contains("3"), ParseError);

    TempFile g("cl_shortline.csv");
    write_text_file(g.path, std::string(kCampaignCsvHeader) + "\n0.01,3,400\n");
    CHECK_THROWS_WITH_AS(load_campaign(g.path), doctest::Contains("fields"), ParseError);

    TempFile h("cl_badoutcome.csv");
    write_text_file(h.path, std::string(kCampaignCsvHeader) +
                                "\n0.01,3,400,1.5,0.2,0.01,0.02,0.5,0.6,0.7,maybe\n");
    CHECK_THROWS_AS(load_campaign(h.path), ParseError);
}

TEST_CASE("loader re-sorts shuffled rows into canonical order") {
    TempFile f("cl_shuffled.csv");
    write_text_file(f.path, std::string(kCampaignCsvHeader) +
                                "\n0.02,6,400,1,0,0,0,0.5,0.6,0.7,cleared\n"
                                "0.01,3,800,1,0,0,0,0.5,0.6,0.7,cleared\n"
                                "0.02,3,400,1,0,0,0,0.5,0.6,0.7,stalled\n"
                                "0.01,3,400,1,0,0,0,0.5,0.6,0.7,cleared\n");
    const CampaignResult c = load_campaign(f.path);
    REQUIRE(c.records.size() == 4);
    for (std::size_t i = 1; i < c.records.size(); ++i)
        CHECK_FALSE(record_order(c.records[i], c.records[i - 1]));
    CHECK(c.records[0].cAV == 400.0);
    CHECK(c.records[1].cAV == 800.0);
    CHECK(c.records[2].vc == 3.0);
    CHECK(c.records[3].vc == 6.0);
    // Without a sidecar the plan is reconstructed from the observed levels.
    CHECK(c.plan.hO_levels == std::vector<double>{0.01, 0.02});
    CHECK(c.plan.cAV_levels == std::vector<double>{400.0, 800.0});
}
