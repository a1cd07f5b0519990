#ifndef CROSSING_LAB_CAMPAIGN_HPP
#define CROSSING_LAB_CAMPAIGN_HPP

#include <string>
#include <vector>

#include "crossing_lab/scenario.hpp"

namespace crossing_lab {

/// Full-factorial plan over (hO, vc, cAV). Defaults are the published grid:
/// hO at {25, 50, 80, 90, 100}% of the 0.0745 m wheel radius, vc at
/// {3, 6, 9, 12, 15} m/s, cAV at {400, 800, 1600, 3200, 6400} N*s/m.
struct DoePlan {
    std::vector<double> hO_levels;
    std::vector<double> vc_levels;
    std::vector<double> cAV_levels;
    int replicate_count = 1;

    static DoePlan defaults(double wheel_radius = 0.0745);
    void validate(double wheel_radius) const;
    std::size_t cell_count() const {
        return hO_levels.size() * vc_levels.size() * cAV_levels.size() *
               static_cast<std::size_t>(replicate_count);
    }
};

/// One row of the campaign table (field names match the on-disk schema).
struct TrialRecord {
    double hO = 0.0;
    double vc = 0.0;
    double cAV = 0.0;
    double delta_Ec = 0.0;
    double pitch_rate_t2 = 0.0;
    double cdwo = 0.0;
    double dx_w_max = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    Outcome outcome = Outcome::Failed;
};

struct TrialFailure {
    double hO = 0.0, vc = 0.0, cAV = 0.0;
    std::string diagnostic;
};

struct CampaignResult {
    DoePlan plan;
    std::vector<TrialRecord> records;   // canonical lexicographic (hO, vc, cAV) order
    std::vector<TrialFailure> failures;
    std::string config_hash;
    std::string code_version;
};

inline constexpr const char* kCampaignCsvHeader =
    "hO_m,vc_mps,cAV_Nspm,delta_Ec_J,pitch_rate_t2_radps,cdwo_s,dx_w_max_m,t1_s,t2_s,t3_s,outcome";

/// Runs every cell exactly once per replicate on a bounded worker pool.
/// Record order is the deterministic lexicographic order of (hO, vc, cAV)
/// regardless of worker count.
CampaignResult run_campaign(const DoePlan& plan, const VehicleParams& vehicle,
                            const ContactParams& contact, int workers,
                            const SolverOptions& solver = {},
                            const std::string& config_hash = "");

/// Campaign CSV (fixed header above) plus a sidecar JSON holding the plan,
/// failures and provenance at `csv_path` + ".meta.json".
void save_campaign(const CampaignResult& result, const std::string& csv_path);

/// Round-trip loader; rows are re-sorted to canonical order. Malformed
/// files raise ParseError naming the offending line/column.
CampaignResult load_campaign(const std::string& csv_path);

/// Canonical comparison key used for the deterministic record order.
bool record_order(const TrialRecord& a, const TrialRecord& b);

} // namespace crossing_lab

#endif
