#include "crossing_lab/export.hpp"

#include <sstream>

#include <json.hpp>

#include "crossing_lab/io.hpp"

namespace crossing_lab {

std::string timeseries_to_csv(const TimeSeries& s) {
    std::ostringstream out;
    out << kTimeSeriesCsvHeader << "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_double(s.t[i]) << ',' << format_double(s.x_c[i]) << ','
            << format_double(s.z_c[i]) << ',' << format_double(s.theta[i]) << ','
            << format_double(s.v_x[i]) << ',' << format_double(s.v_z[i]) << ','
            << format_double(s.theta_dot[i]) << ',' << format_double(s.s_fx[i]) << ','
            << format_double(s.s_fz[i]) << ',' << format_double(s.s_rz[i]) << ','
            << format_double(s.tau[i]) << ',' << format_double(s.E_c[i]) << ','
            << int(s.front_contact[i]) << ',' << int(s.rear_contact[i]) << "\n";
    }
    return out.str();
}

std::string trial_metrics_to_json(const TrialResult& r) {
    nlohmann::json j;
    j["hO"] = r.config.hO;
    j["vc"] = r.config.vc;
    j["cAV"] = r.config.cAV;
    j["delta_Ec"] = r.metrics.delta_Ec;
    j["pitch_rate_t2"] = r.metrics.pitch_rate_t2;
    j["cdwo"] = r.metrics.cdwo;
    j["dx_w_max"] = r.metrics.dx_w_max;
    j["t1"] = r.events.t1;
    j["t2"] = r.events.t2;
    j["t3"] = r.events.t3;
    j["outcome"] = to_string(r.outcome);
    if (r.failed) j["diagnostic"] = r.diagnostic;
    return j.dump(2) + "\n";
}

std::string surface_plot_csv(const FittedSurface& surface, const CampaignResult& campaign) {
    std::ostringstream out;
    out << "vc_mps,cAV_Nspm,predicted,observed\n";
    for (const TrialRecord& r : campaign.records) {
        if (r.hO != surface.hO) continue;
        double observed = 0.0;
        switch (surface.spec.metric) {
            case Metric::DeltaEc: observed = r.delta_Ec; break;
            case Metric::PitchRate: observed = r.pitch_rate_t2; break;
            case Metric::Cdwo: observed = r.cdwo; break;
        }
        out << format_double(r.vc) << ',' << format_double(r.cAV) << ','
            << format_double(evaluate_surface(surface, r.vc, r.cAV)) << ','
            << format_double(observed) << "\n";
    }
    return out.str();
}

} // namespace crossing_lab
