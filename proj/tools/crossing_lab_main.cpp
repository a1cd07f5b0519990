// crossing-lab: planar step-obstacle crossing simulator, DoE campaign
// runner, response-surface fitter and crossing-strategy optimizer.
//
// Subcommands: simulate, campaign, fit, optimize, plot-data.
// Exit codes for simulate: 0 cleared / rear-flyover, 2 stalled,
// 3 tipped, 4 rear-contact, 5 failed trial, 1 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crossing_lab/config.hpp"
#include "crossing_lab/export.hpp"
#include "crossing_lab/io.hpp"
#include "crossing_lab/strategy.hpp"

namespace fs = std::filesystem;
using namespace crossing_lab;
using nlohmann::json;

namespace {

std::string resolve_out_dir(const std::string& cli_out, const RunConfig& cfg) {
    if (const char* env = std::getenv("CROSSING_LAB_OUT"); env && *env) return env;
    if (!cli_out.empty()) return cli_out;
    return cfg.output_dir;
}

RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return RunConfig::defaults();
    return RunConfig::load(path);
}

TorqueSchedule parse_schedule(const std::string& text) {
    TorqueSchedule s;
    if (text.empty()) return s;
    s.mode = TorqueSchedule::Mode::Scheduled;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("--torque-schedule entries must be offset:torque");
        s.entries.emplace_back(parse_double(item.substr(0, colon), "torque-schedule offset"),
                               parse_double(item.substr(colon + 1), "torque-schedule value"));
    }
    std::sort(s.entries.begin(), s.entries.end());
    return s;
}

int cmd_simulate(const std::string& config_path, double hO, double vc, double cav,
                 const std::string& schedule_text, const std::string& out) {
    const RunConfig cfg = load_config_or_default(config_path);
    if (!(cav > 0.0)) throw ConfigError("--cav must be > 0");
    const TorqueSchedule schedule = parse_schedule(schedule_text);

    const std::string dir = resolve_out_dir(out, cfg);
    fs::create_directories(dir);

    const TrialResult r =
        run_trial(cfg.vehicle, cfg.contact, hO, vc, cav, schedule, cfg.solver);
    write_text_file(dir + "/trial_timeseries.csv", timeseries_to_csv(r.series));
    write_text_file(dir + "/trial_metrics.json", trial_metrics_to_json(r));
    std::cout << "outcome: " << to_string(r.outcome) << "\n";

    switch (r.outcome) {
        case Outcome::Cleared:
        case Outcome::RearFlyover: return 0;
        case Outcome::Stalled: return 2;
        case Outcome::Tipped: return 3;
        case Outcome::RearContact: return 4;
        case Outcome::Failed: return 5;
    }
    return 5;
}

int cmd_campaign(const std::string& config_path, const std::string& out, int workers_flag) {
    const RunConfig cfg = load_config_or_default(config_path);
    const int workers = workers_flag > 0 ? workers_flag : cfg.workers;
    const std::string dir = resolve_out_dir(out, cfg);
    fs::create_directories(dir);

    const CampaignResult result =
        run_campaign(cfg.plan, cfg.vehicle, cfg.contact, workers, cfg.solver, cfg.config_hash);
    const std::string csv_path = dir + "/campaign.csv";
    try {
        save_campaign(result, csv_path);
    } catch (const std::exception& e) {
        // Persistence failure: preserve partial results in a recovery file.
        const std::string recovery = "campaign.recovery.csv";
        std::cerr << "error: " << e.what() << "; writing recovery file " << recovery << "\n";
        save_campaign(result, recovery);
        return 1;
    }
    std::cout << result.records.size() << " records, " << result.failures.size()
              << " failures -> " << csv_path << "\n";
    return result.failures.empty() ? 0 : 1;
}

int cmd_fit(const std::string& campaign_path, const std::string& out, bool exclude_violations,
            const std::string& scaling, double stroke_limit) {
    const CampaignResult campaign = load_campaign(campaign_path);
    FitReportOptions opts;
    opts.exclude_stroke_violations = exclude_violations;
    opts.stroke_limit = stroke_limit;
    opts.scaling = (scaling == "raw") ? Scaling::Raw : Scaling::Standardized;

    const std::string dir = out.empty() ? "." : out;
    fs::create_directories(dir);
    const std::vector<FitReportEntry> report = fit_report(campaign, opts);
    write_text_file(dir + "/surfaces.json", surfaces_to_json(report));

    int failures = 0;
    for (const FitReportEntry& e : report) {
        if (!e.ok) {
            std::cerr << "fit failed (" << to_string(e.surface.spec.metric) << ", hO="
                      << format_double(e.surface.hO) << "): " << e.error << "\n";
            ++failures;
            continue;
        }
        std::ostringstream name;
        name << dir << "/surface_" << to_string(e.surface.spec.metric) << "_hO_"
             << format_double(e.surface.hO * 1000.0) << "mm.csv";
        write_text_file(name.str(), surface_plot_csv(e.surface, campaign));
    }
    std::cout << report.size() - failures << "/" << report.size() << " surfaces -> " << dir
              << "/surfaces.json\n";
    return failures == 0 ? 0 : 1;
}

int cmd_optimize(const std::string& surfaces_path, const std::string& campaign_path,
                 const std::string& query_path, const std::string& out) {
    const std::vector<FittedSurface> surfaces = surfaces_from_json(read_text_file(surfaces_path));
    const CampaignResult campaign = load_campaign(campaign_path);
    const json q = json::parse(read_text_file(query_path));

    StrategyProblem problem;
    problem.surfaces = surfaces;
    problem.hO = q.at("hO_m").get<double>();
    problem.vc = q.at("vc_mps").get<double>();
    if (q.contains("weights")) {
        const auto w = q.at("weights").get<std::vector<double>>();
        if (w.size() != 3) throw ConfigError("query.weights must have 3 entries");
        problem.weight_energy = w[0];
        problem.weight_pitch = w[1];
        problem.weight_contact = w[2];
    }
    if (q.contains("detection_distance_m"))
        problem.detection_distance = q.at("detection_distance_m").get<double>();
    if (q.contains("stroke_limit_m")) problem.stroke_limit = q.at("stroke_limit_m").get<double>();
    if (q.contains("cAV_bounds_Nspm")) {
        const auto b = q.at("cAV_bounds_Nspm").get<std::vector<double>>();
        if (b.size() != 2) throw ConfigError("query.cAV_bounds_Nspm must have 2 entries");
        problem.cAV_min = b[0];
        problem.cAV_max = b[1];
    }

    const StrategyDecision d = optimize(problem, campaign);
    const std::string path = out.empty() ? "decision.json" : out;
    write_text_file(path, decision_to_json(d));
    std::cout << "cAV* = " << format_double(d.cAV_star) << " N*s/m, feasible = "
              << (d.feasible ? "true" : "false") << " -> " << path << "\n";
    return 0;
}

int cmd_plot_data(const std::string& surfaces_path, const std::string& campaign_path,
                  const std::string& out) {
    const std::vector<FittedSurface> surfaces = surfaces_from_json(read_text_file(surfaces_path));
    const CampaignResult campaign = load_campaign(campaign_path);
    const std::string dir = out.empty() ? "." : out;
    fs::create_directories(dir);
    for (const FittedSurface& s : surfaces) {
        std::ostringstream name;
        name << dir << "/surface_" << to_string(s.spec.metric) << "_hO_"
             << format_double(s.hO * 1000.0) << "mm.csv";
        write_text_file(name.str(), surface_plot_csv(s, campaign));
    }
    std::cout << surfaces.size() << " plot-data files -> " << dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crossing-lab: step-obstacle crossing simulation and strategy toolkit "
                 "(file schema version " + std::to_string(kConfigSchemaVersion) + ")"};
    app.require_subcommand(1);

    std::string config_path, out_dir, schedule_text, scaling = "standardized";
    std::string campaign_path, surfaces_path, query_path;
    double hO = 0.0186, vc = 12.0, cav = 1600.0, stroke_limit = 0.05;
    int workers = 0;
    bool exclude_violations = false;

    auto* sim = app.add_subcommand(
        "simulate", "Run one crossing trial; writes trial_timeseries.csv (columns t,x_c,z_c,"
                    "theta,v_x,v_z,theta_dot,s_fx,s_fz,s_rz,tau,E_c,front_contact,rear_contact) "
                    "and trial_metrics.json");
    sim->add_option("--config", config_path, "Run configuration JSON (defaults when omitted)");
    sim->add_option("--hO", hO, "Obstacle height, m")->required();
    sim->add_option("--vc", vc, "Approach speed, m/s")->required();
    sim->add_option("--cav", cav, "Front longitudinal damping c_AV, N*s/m")->required();
    sim->add_option("--torque-schedule", schedule_text,
                    "Crossing torque schedule 'offset_s:torque_Nm,...' (offsets from t1; "
                    "default holds the pre-crossing torque)");
    sim->add_option("--out", out_dir, "Output directory (CROSSING_LAB_OUT overrides)");

    auto* camp = app.add_subcommand(
        "campaign", "Run the full-factorial DoE; writes campaign.csv (header '" +
                        std::string(kCampaignCsvHeader) + "') plus campaign.csv.meta.json");
    camp->add_option("--config", config_path, "Run configuration JSON");
    camp->add_option("--workers", workers, "Worker threads (overrides config)");
    camp->add_option("--out", out_dir, "Output directory (CROSSING_LAB_OUT overrides)");

    auto* fit = app.add_subcommand(
        "fit", "Fit the three response surfaces per obstacle height; writes surfaces.json "
               "({metric, hO_m, basis, coefficients, r2, rmse, n}) and per-surface plot CSVs");
    fit->add_option("--campaign", campaign_path, "campaign.csv path")->required();
    fit->add_option("--scaling", scaling, "raw | standardized (default standardized)");
    fit->add_flag("--exclude-stroke-violations", exclude_violations,
                  "Exclude trials with dx_w_max >= (8/3)*stroke limit from the fits");
    fit->add_option("--stroke-limit", stroke_limit, "Stroke limit delta_L_max, m");
    fit->add_option("--out", out_dir, "Output directory");

    auto* opt = app.add_subcommand(
        "optimize", "Pick c_AV for a detected obstacle; query JSON {hO_m, vc_mps, weights, "
                    "detection_distance_m}; writes a decision JSON with the Pareto set");
    opt->add_option("--surfaces", surfaces_path, "surfaces.json path")->required();
    opt->add_option("--campaign", campaign_path, "campaign.csv path")->required();
    opt->add_option("--query", query_path, "Query JSON path")->required();
    opt->add_option("--out", out_dir, "Decision JSON output path");

    auto* plot = app.add_subcommand(
        "plot-data", "Re-emit gridded (vc, cAV, predicted, observed) CSVs from saved surfaces");
    plot->add_option("--surfaces", surfaces_path, "surfaces.json path")->required();
    plot->add_option("--campaign", campaign_path, "campaign.csv path")->required();
    plot->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, hO, vc, cav, schedule_text, out_dir);
        if (camp->parsed()) return cmd_campaign(config_path, out_dir, workers);
        if (fit->parsed())
            return cmd_fit(campaign_path, out_dir, exclude_violations, scaling, stroke_limit);
        if (opt->parsed()) return cmd_optimize(surfaces_path, campaign_path, query_path, out_dir);
        if (plot->parsed()) return cmd_plot_data(surfaces_path, campaign_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
