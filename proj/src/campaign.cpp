#include "crossing_lab/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "crossing_lab/io.hpp"

namespace crossing_lab {

using nlohmann::json;

DoePlan DoePlan::defaults(double wheel_radius) {
    DoePlan p;
    p.hO_levels = {0.25 * wheel_radius, 0.50 * wheel_radius, 0.80 * wheel_radius,
                   0.90 * wheel_radius, 1.00 * wheel_radius};
    p.vc_levels = {3.0, 6.0, 9.0, 12.0, 15.0};
    p.cAV_levels = {400.0, 800.0, 1600.0, 3200.0, 6400.0};
    return p;
}

void DoePlan::validate(double wheel_radius) const {
    auto check_levels = [](const std::vector<double>& v, const char* name) {
        if (v.empty()) throw ConfigError(std::string("plan.") + name + " must be nonempty");
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1]))
                throw ConfigError(std::string("plan.") + name + " must be strictly increasing");
    };
    check_levels(hO_levels, "hO_levels");
    check_levels(vc_levels, "vc_levels");
    check_levels(cAV_levels, "cAV_levels");
    if (replicate_count < 1) throw ConfigError("plan.replicate_count must be >= 1");
    for (double h : hO_levels)
        if (!(h >= 0.0 && h <= 1.5 * wheel_radius))
            throw ConfigError("plan.hO_levels out of the run_trial precondition range");
    for (double v : vc_levels)
        if (!(v > 0.0 && v <= 20.0))
            throw ConfigError("plan.vc_levels out of the run_trial precondition range");
    for (double c : cAV_levels)
        if (!(c > 0.0)) throw ConfigError("plan.cAV_levels must be positive");
}

bool record_order(const TrialRecord& a, const TrialRecord& b) {
    if (a.hO != b.hO) return a.hO < b.hO;
    if (a.vc != b.vc) return a.vc < b.vc;
    return a.cAV < b.cAV;
}

CampaignResult run_campaign(const DoePlan& plan, const VehicleParams& vehicle,
                            const ContactParams& contact, int workers,
                            const SolverOptions& solver, const std::string& config_hash) {
    if (workers < 1) throw std::invalid_argument("run_campaign: workers must be >= 1");
    plan.validate(vehicle.wheel_radius);

    struct Cell { double hO, vc, cAV; };
    std::vector<Cell> cells;
    cells.reserve(plan.cell_count());
    for (int rep = 0; rep < plan.replicate_count; ++rep)
        for (double hO : plan.hO_levels)
            for (double vc : plan.vc_levels)
                for (double cAV : plan.cAV_levels) cells.push_back({hO, vc, cAV});

    struct Slot {
        TrialRecord record;
        bool failed = false;
        std::string diagnostic;
    };
    std::vector<Slot> slots(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker_fn = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            Slot& slot = slots[i];
            slot.record.hO = c.hO;
            slot.record.vc = c.vc;
            slot.record.cAV = c.cAV;
            try {
                const TrialResult r = run_trial(vehicle, contact, c.hO, c.vc, c.cAV, {}, solver);
                if (r.failed) {
                    slot.failed = true;
                    slot.diagnostic = r.diagnostic;
                    continue;
                }
                slot.record.delta_Ec = r.metrics.delta_Ec;
                slot.record.pitch_rate_t2 = r.metrics.pitch_rate_t2;
                slot.record.cdwo = r.metrics.cdwo;
                slot.record.dx_w_max = r.metrics.dx_w_max;
                slot.record.t1 = r.events.t1;
                slot.record.t2 = r.events.t2;
                slot.record.t3 = r.events.t3;
                slot.record.outcome = r.outcome;
            } catch (const std::exception& e) {
                slot.failed = true;
                slot.diagnostic = e.what();
            }
        }
    };

    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }

    CampaignResult result;
    result.plan = plan;
    result.config_hash = config_hash;
    result.code_version = kVersion;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (slots[i].failed) {
            result.failures.push_back(
                {cells[i].hO, cells[i].vc, cells[i].cAV, slots[i].diagnostic});
        } else {
            result.records.push_back(slots[i].record);
        }
    }
    std::stable_sort(result.records.begin(), result.records.end(), record_order);
    return result;
}

namespace {

json plan_to_json(const DoePlan& p) {
    return json{{"hO_levels", p.hO_levels},
                {"vc_levels", p.vc_levels},
                {"cAV_levels", p.cAV_levels},
                {"replicate_count", p.replicate_count}};
}

DoePlan plan_from_json(const json& j) {
    DoePlan p;
    p.hO_levels = j.at("hO_levels").get<std::vector<double>>();
    p.vc_levels = j.at("vc_levels").get<std::vector<double>>();
    p.cAV_levels = j.at("cAV_levels").get<std::vector<double>>();
    p.replicate_count = j.at("replicate_count").get<int>();
    return p;
}

} // namespace

void save_campaign(const CampaignResult& result, const std::string& csv_path) {
    std::ostringstream csv;
    csv << kCampaignCsvHeader << "\n";
    for (const TrialRecord& r : result.records) {
        csv << format_double(r.hO) << ',' << format_double(r.vc) << ','
            << format_double(r.cAV) << ',' << format_double(r.delta_Ec) << ','
            << format_double(r.pitch_rate_t2) << ',' << format_double(r.cdwo) << ','
            << format_double(r.dx_w_max) << ',' << format_double(r.t1) << ','
            << format_double(r.t2) << ',' << format_double(r.t3) << ','
            << to_string(r.outcome) << "\n";
    }
    write_text_file(csv_path, csv.str());

    json meta;
    meta["plan"] = plan_to_json(result.plan);
    meta["provenance"] = {{"config_hash", result.config_hash},
                          {"code_version", result.code_version}};
    meta["failures"] = json::array();
    for (const TrialFailure& f : result.failures)
        meta["failures"].push_back(
            {{"hO", f.hO}, {"vc", f.vc}, {"cAV", f.cAV}, {"diagnostic", f.diagnostic}});
    write_text_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

CampaignResult load_campaign(const std::string& csv_path) {
    const std::string content = read_text_file(csv_path);
    std::istringstream ss(content);
    std::string line;
    if (!std::getline(ss, line)) throw ParseError(csv_path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> expected = split_csv_line(kCampaignCsvHeader);
    const std::vector<std::string> header = split_csv_line(line);
    for (const std::string& col : expected)
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw ParseError(csv_path + ": missing column '" + col + "'");
    if (header != expected)
        throw ParseError(csv_path + ": header columns out of order or extra columns present");

    CampaignResult result;
    result.code_version = kVersion;
    int lineno = 1;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != expected.size())
            throw ParseError(csv_path + ": line " + std::to_string(lineno) + " has " +
                             std::to_string(f.size()) + " fields, expected " +
                             std::to_string(expected.size()));
        const std::string ctx = csv_path + ":" + std::to_string(lineno);
        TrialRecord r;
        r.hO = parse_double(f[0], ctx + " hO_m");
        r.vc = parse_double(f[1], ctx + " vc_mps");
        r.cAV = parse_double(f[2], ctx + " cAV_Nspm");
        r.delta_Ec = parse_double(f[3], ctx + " delta_Ec_J");
        r.pitch_rate_t2 = parse_double(f[4], ctx + " pitch_rate_t2_radps");
        r.cdwo = parse_double(f[5], ctx + " cdwo_s");
        r.dx_w_max = parse_double(f[6], ctx + " dx_w_max_m");
        r.t1 = parse_double(f[7], ctx + " t1_s");
        r.t2 = parse_double(f[8], ctx + " t2_s");
        r.t3 = parse_double(f[9], ctx + " t3_s");
        r.outcome = outcome_from_string(f[10]);
        result.records.push_back(r);
    }
    std::stable_sort(result.records.begin(), result.records.end(), record_order);

    const std::string meta_path = csv_path + ".meta.json";
    if (std::filesystem::exists(meta_path)) {
        const json meta = json::parse(read_text_file(meta_path));
        result.plan = plan_from_json(meta.at("plan"));
        result.config_hash = meta.at("provenance").at("config_hash").get<std::string>();
        result.code_version = meta.at("provenance").at("code_version").get<std::string>();
        for (const json& jf : meta.at("failures"))
            result.failures.push_back({jf.at("hO").get<double>(), jf.at("vc").get<double>(),
                                       jf.at("cAV").get<double>(),
                                       jf.at("diagnostic").get<std::string>()});
    } else {
        // Reconstruct the plan from the observed levels.
        auto levels = [](auto getter, const std::vector<TrialRecord>& rs) {
            std::set<double> s;
            for (const auto& r : rs) s.insert(getter(r));
            return std::vector<double>(s.begin(), s.end());
        };
        result.plan.hO_levels = levels([](const TrialRecord& r) { return r.hO; }, result.records);
        result.plan.vc_levels = levels([](const TrialRecord& r) { return r.vc; }, result.records);
        result.plan.cAV_levels =
            levels([](const TrialRecord& r) { return r.cAV; }, result.records);
    }
    return result;
}

} // namespace crossing_lab
