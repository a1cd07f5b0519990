#ifndef CROSSING_LAB_STRATEGY_HPP
#define CROSSING_LAB_STRATEGY_HPP

#include "crossing_lab/fitting.hpp"

namespace crossing_lab {

struct StrategyProblem {
    std::vector<FittedSurface> surfaces; // all metrics, all hO levels
    double hO = 0.0;                     // detected obstacle height, m
    double vc = 0.0;                     // current speed, m/s
    double cAV_min = 400.0;              // N*s/m
    double cAV_max = 6400.0;
    double torque_min = -8.0;            // N*m
    double torque_max = 8.0;
    double stroke_limit = 0.05;          // delta_L_max, m
    double weight_energy = 1.0;          // w_E
    double weight_pitch = 1.0;           // w_delta
    double weight_contact = 1.0;         // w_C
    double detection_distance = 1.0;     // m
    double torque_demand = 0.0;          // speed-hold demand, clamped into tau_command
    int grid_points = 1000;

    void validate() const;
};

struct ParetoPoint {
    double cAV = 0.0;
    double delta_Ec = 0.0;
    double pitch_rate = 0.0;
    double cdwo = 0.0;
};

struct StrategyDecision {
    double cAV_star = 0.0;
    double tau_command = 0.0;
    double predicted_delta_Ec = 0.0;
    double predicted_pitch_rate = 0.0;
    double predicted_cdwo = 0.0;
    bool feasible = false;
    std::vector<ParetoPoint> pareto_set;
    double time_budget = 0.0;     // s, detection_distance / vc
    double decision_time = 0.0;   // s, measured wall-clock of optimize()
};

struct DxwEstimate {
    double value = 0.0;
    bool extrapolated = false;
};

/// Maximum longitudinal wheel excursion predicted from the campaign table:
/// bilinear interpolation over the (vc, cAV) grid at the two bracketing hO
/// levels, linear between them. Queries outside the grid hull are clamped
/// to the boundary and flagged.
DxwEstimate predict_dxw(double hO, double vc, double cAV, const CampaignResult& campaign);

/// All cAV grid candidates satisfying the stroke constraint
/// dx_w < (8/3) * stroke_limit. Empty means infeasible.
std::vector<double> feasible_set(const StrategyProblem& problem, const CampaignResult& campaign);

/// Weighted-sum scalarization over range-normalized objectives
/// (minimize w_E*dE + w_d*|pitch rate| - w_C*CDWO) restricted to the Pareto
/// set of the feasible candidates; ties break to the smaller cAV.
StrategyDecision optimize(const StrategyProblem& problem, const CampaignResult& campaign);

/// detection_distance / vc; detecting at 1 m while moving 15 m/s leaves 0.067 s.
double anticipation_budget(double detection_distance, double vc);

std::string decision_to_json(const StrategyDecision& d);

} // namespace crossing_lab

#endif
