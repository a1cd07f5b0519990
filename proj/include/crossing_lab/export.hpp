#ifndef CROSSING_LAB_EXPORT_HPP
#define CROSSING_LAB_EXPORT_HPP

#include "crossing_lab/fitting.hpp"
#include "crossing_lab/scenario.hpp"

namespace crossing_lab {

inline constexpr const char* kTimeSeriesCsvHeader =
    "t,x_c,z_c,theta,v_x,v_z,theta_dot,s_fx,s_fz,s_rz,tau,E_c,front_contact,rear_contact";

/// Trial time series in the documented column order (bit-exact header).
std::string timeseries_to_csv(const TimeSeries& series);

/// Per-trial metric record {hO, vc, cAV, delta_Ec, pitch_rate_t2, cdwo,
/// dx_w_max, t1, t2, t3, outcome}.
std::string trial_metrics_to_json(const TrialResult& result);

/// Gridded (vc, cAV, predicted, observed) CSV for one fitted surface.
std::string surface_plot_csv(const FittedSurface& surface, const CampaignResult& campaign);

} // namespace crossing_lab

#endif
