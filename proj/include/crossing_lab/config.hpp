#ifndef CROSSING_LAB_CONFIG_HPP
#define CROSSING_LAB_CONFIG_HPP

#include <string>

#include "crossing_lab/campaign.hpp"

namespace crossing_lab {

inline constexpr int kConfigSchemaVersion = 1;

/// Parsed run configuration. The file is JSON with sections mirroring the
/// module names; paper-unit fields (N/mm, N*s/mm, mm, mm/s) are converted
/// to SI here. A stiffness with force exponent e converts as
/// k_SI = k_mm * 1000^e. Unknown keys are rejected with their field path.
struct RunConfig {
    VehicleParams vehicle;
    ContactParams contact;
    DoePlan plan;
    SolverOptions solver;
    int workers = 1;
    std::string output_dir = "out";
    std::string config_hash; // FNV-1a of the canonical parsed form

    static RunConfig defaults();
    static RunConfig from_json_text(const std::string& text, const std::string& origin = "config");
    static RunConfig load(const std::string& path);
};

} // namespace crossing_lab

#endif
