#include "crossing_lab/strategy.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

namespace crossing_lab {

using nlohmann::json;

void StrategyProblem::validate() const {
    if (!(weight_energy >= 0.0 && weight_pitch >= 0.0 && weight_contact >= 0.0))
        throw std::invalid_argument("strategy weights must be >= 0");
    if (weight_energy == 0.0 && weight_pitch == 0.0 && weight_contact == 0.0)
        throw std::invalid_argument("strategy weights must not all be zero");
    if (!(cAV_min <= cAV_max)) throw std::invalid_argument("cAV bounds out of order");
    if (!(torque_min <= torque_max)) throw std::invalid_argument("torque bounds out of order");
    if (!(vc > 0.0)) throw std::invalid_argument("vc must be > 0");
    if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
}

double anticipation_budget(double detection_distance, double vc) {
    if (!(vc > 0.0)) throw std::invalid_argument("anticipation_budget: vc must be > 0");
    return detection_distance / vc;
}

namespace {

using DxwTable = std::map<std::tuple<double, double, double>, double>;

DxwTable build_dxw_table(const CampaignResult& campaign) {
    DxwTable table;
    for (const TrialRecord& r : campaign.records) table[{r.hO, r.vc, r.cAV}] = r.dx_w_max;
    return table;
}

struct Bracket {
    std::size_t lo = 0, hi = 0;
    double u = 0.0;
    bool extrapolated = false;
};

Bracket bracket(const std::vector<double>& levels, double q) {
    Bracket b;
    if (levels.empty()) throw std::invalid_argument("empty level grid");
    if (q <= levels.front()) {
        b.extrapolated = q < levels.front();
        return b;
    }
    if (q >= levels.back()) {
        b.lo = b.hi = levels.size() - 1;
        b.extrapolated = q > levels.back();
        return b;
    }
    const auto it = std::upper_bound(levels.begin(), levels.end(), q);
    b.hi = static_cast<std::size_t>(it - levels.begin());
    b.lo = b.hi - 1;
    b.u = (q - levels[b.lo]) / (levels[b.hi] - levels[b.lo]);
    return b;
}

DxwEstimate predict_dxw_with_table(double hO, double vc, double cAV,
                                   const CampaignResult& campaign, const DxwTable& table) {
    const std::vector<double>& hs = campaign.plan.hO_levels;
    const std::vector<double>& vs = campaign.plan.vc_levels;
    const std::vector<double>& cs = campaign.plan.cAV_levels;

    auto cell = [&](std::size_t ih, std::size_t iv, std::size_t ic) {
        const auto it = table.find({hs[ih], vs[iv], cs[ic]});
        if (it == table.end())
            throw ParseError("predict_dxw: campaign is missing the cell (hO=" +
                             std::to_string(hs[ih]) + ", vc=" + std::to_string(vs[iv]) +
                             ", cAV=" + std::to_string(cs[ic]) + ")");
        return it->second;
    };

    const Bracket bh = bracket(hs, hO);
    const Bracket bv = bracket(vs, vc);
    const Bracket bc = bracket(cs, cAV);

    auto bilinear = [&](std::size_t ih) {
        const double v00 = cell(ih, bv.lo, bc.lo);
        const double v01 = cell(ih, bv.lo, bc.hi);
        const double v10 = cell(ih, bv.hi, bc.lo);
        const double v11 = cell(ih, bv.hi, bc.hi);
        const double a = v00 + (v01 - v00) * bc.u;
        const double b = v10 + (v11 - v10) * bc.u;
        return a + (b - a) * bv.u;
    };

    DxwEstimate est;
    const double lo = bilinear(bh.lo);
    const double hi = bilinear(bh.hi);
    est.value = lo + (hi - lo) * bh.u;
    est.extrapolated = bh.extrapolated || bv.extrapolated || bc.extrapolated;
    return est;
}

std::vector<double> feasible_set_with_table(const StrategyProblem& problem,
                                            const CampaignResult& campaign,
                                            const DxwTable& table) {
    problem.validate();
    const double limit = (8.0 / 3.0) * problem.stroke_limit;
    // The trilinear prediction is piecewise-linear in cAV between table
    // levels, so evaluating once per level and interpolating is exact.
    const std::vector<double>& cs = campaign.plan.cAV_levels;
    std::vector<double> level_vals(cs.size());
    for (std::size_t k = 0; k < cs.size(); ++k)
        level_vals[k] =
            predict_dxw_with_table(problem.hO, problem.vc, cs[k], campaign, table).value;

    std::vector<double> feasible;
    const int n = problem.grid_points;
    for (int i = 0; i < n; ++i) {
        const double cav =
            problem.cAV_min + (problem.cAV_max - problem.cAV_min) * i / double(n - 1);
        const Bracket bc = bracket(cs, cav);
        const double dxw = level_vals[bc.lo] + (level_vals[bc.hi] - level_vals[bc.lo]) * bc.u;
        if (dxw < limit) feasible.push_back(cav);
    }
    return feasible;
}

} // namespace

DxwEstimate predict_dxw(double hO, double vc, double cAV, const CampaignResult& campaign) {
    return predict_dxw_with_table(hO, vc, cAV, campaign, build_dxw_table(campaign));
}

std::vector<double> feasible_set(const StrategyProblem& problem, const CampaignResult& campaign) {
    return feasible_set_with_table(problem, campaign, build_dxw_table(campaign));
}

namespace {

// Collapses a metric's surfaces at fixed (hO, vc) into a cubic polynomial in
// cAV: linear hO interpolation between the bracketing levels folded into the
// coefficients. Lets the optimizer evaluate candidates with one Horner pass.
std::array<double, 4> cav_polynomial(const std::vector<FittedSurface>& surfaces, Metric metric,
                                     double hO, double vc) {
    std::vector<const FittedSurface*> matching;
    for (const FittedSurface& s : surfaces)
        if (s.spec.metric == metric) matching.push_back(&s);
    if (matching.empty())
        throw std::invalid_argument("no fitted surface for metric " + to_string(metric));
    std::sort(matching.begin(), matching.end(),
              [](const FittedSurface* a, const FittedSurface* b) { return a->hO < b->hO; });
    std::vector<double> levels;
    for (const FittedSurface* s : matching) levels.push_back(s->hO);
    const Bracket b = bracket(levels, hO);

    std::array<double, 4> poly{0.0, 0.0, 0.0, 0.0};
    auto accumulate = [&](const FittedSurface& s, double w) {
        if (w == 0.0) return;
        for (std::size_t j = 0; j < s.spec.basis.size(); ++j) {
            const auto [pv, pc] = s.spec.basis[j];
            if (pc < 0 || pc > 3)
                throw std::invalid_argument("surface basis exceeds cubic in cAV");
            poly[static_cast<std::size_t>(pc)] += w * s.coefficients[j] * std::pow(vc, pv);
        }
    };
    accumulate(*matching[b.lo], 1.0 - b.u);
    accumulate(*matching[b.hi], b.lo == b.hi ? 0.0 : b.u);
    return poly;
}

double horner(const std::array<double, 4>& c, double x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

} // namespace

StrategyDecision optimize(const StrategyProblem& problem, const CampaignResult& campaign) {
    const auto t_start = std::chrono::steady_clock::now();
    problem.validate();

    StrategyDecision d;
    d.time_budget = anticipation_budget(problem.detection_distance, problem.vc);
    d.tau_command = std::clamp(problem.torque_demand, problem.torque_min, problem.torque_max);

    const std::array<double, 4> poly_energy =
        cav_polynomial(problem.surfaces, Metric::DeltaEc, problem.hO, problem.vc);
    const std::array<double, 4> poly_pitch =
        cav_polynomial(problem.surfaces, Metric::PitchRate, problem.hO, problem.vc);
    const std::array<double, 4> poly_cdwo =
        cav_polynomial(problem.surfaces, Metric::Cdwo, problem.hO, problem.vc);
    auto predict = [&](double cav) {
        ParetoPoint p;
        p.cAV = cav;
        p.delta_Ec = horner(poly_energy, cav);
        p.pitch_rate = horner(poly_pitch, cav);
        p.cdwo = horner(poly_cdwo, cav);
        return p;
    };

    const DxwTable table = build_dxw_table(campaign);
    const std::vector<double> candidates = feasible_set_with_table(problem, campaign, table);
    if (candidates.empty()) {
        // Infeasible: report the least-violating candidate.
        d.feasible = false;
        double best_dxw = 1e300;
        double best_cav = problem.cAV_min;
        const std::vector<double>& cs = campaign.plan.cAV_levels;
        std::vector<double> level_vals(cs.size());
        for (std::size_t k = 0; k < cs.size(); ++k)
            level_vals[k] =
                predict_dxw_with_table(problem.hO, problem.vc, cs[k], campaign, table).value;
        const int n = problem.grid_points;
        for (int i = 0; i < n; ++i) {
            const double cav =
                problem.cAV_min + (problem.cAV_max - problem.cAV_min) * i / double(n - 1);
            const Bracket bc = bracket(cs, cav);
            const double dxw =
                level_vals[bc.lo] + (level_vals[bc.hi] - level_vals[bc.lo]) * bc.u;
            if (dxw < best_dxw) { best_dxw = dxw; best_cav = cav; }
        }
        d.cAV_star = best_cav;
        const ParetoPoint p = predict(best_cav);
        d.predicted_delta_Ec = p.delta_Ec;
        d.predicted_pitch_rate = p.pitch_rate;
        d.predicted_cdwo = p.cdwo;
        d.decision_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return d;
    }

    std::vector<ParetoPoint> points;
    points.reserve(candidates.size());
    for (double cav : candidates) points.push_back(predict(cav));

    // Objective triple to minimize: (dE, |pitch rate|, -CDWO).
    auto obj = [](const ParetoPoint& p) {
        return std::array<double, 3>{p.delta_Ec, std::abs(p.pitch_rate), -p.cdwo};
    };

    // Non-dominated filter in O(n log n): sweep in lexicographic objective
    // order, keeping prefix-minimum staircases of (o2 -> min o3). A point is
    // dominated only by sweep predecessors; ties are resolved so that exact
    // duplicates never dominate each other. Keeps optimize() well inside the
    // paper's 0.067 s anticipation budget on 1e3-candidate grids.
    const std::size_t n_pts = points.size();
    std::vector<std::array<double, 3>> o(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) o[i] = obj(points[i]);
    std::vector<std::size_t> order(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return o[a] < o[b]; });

    // Staircase: keys ascending, values (min o3) strictly descending.
    using Staircase = std::map<double, double>;
    auto stair_insert = [](Staircase& st, double key, double value) {
        auto it = st.upper_bound(key);
        if (it != st.begin() && std::prev(it)->second <= value) return; // redundant
        it = st.insert_or_assign(it, key, value);
        auto next = std::next(it);
        while (next != st.end() && next->second >= value) next = st.erase(next);
    };
    // Minimum o3 over entries with key <= bound (or < bound when strict).
    auto stair_min = [](const Staircase& st, double bound, bool strict) {
        auto it = strict ? st.lower_bound(bound) : st.upper_bound(bound);
        if (it == st.begin()) return std::numeric_limits<double>::infinity();
        return std::prev(it)->second;
    };

    std::vector<bool> dominated(n_pts, false);
    Staircase prev_groups; // points with strictly smaller o1
    std::size_t g = 0;
    while (g < n_pts) {
        std::size_t g_end = g;
        while (g_end < n_pts && o[order[g_end]][0] == o[order[g]][0]) ++g_end;
        Staircase same_group;
        for (std::size_t k = g; k < g_end; ++k) {
            const std::size_t i = order[k];
            const double a = o[i][1], b = o[i][2];
            if (stair_min(prev_groups, a, false) <= b) {
                dominated[i] = true; // strict in o1
            } else if (stair_min(same_group, a, true) <= b) {
                dominated[i] = true; // equal o1, strict in o2
            } else if (stair_min(same_group, a, false) < b) {
                dominated[i] = true; // equal o1 and o2, strict in o3
            }
            stair_insert(same_group, a, b);
        }
        for (const auto& [key, value] : same_group) stair_insert(prev_groups, key, value);
        g = g_end;
    }
    for (std::size_t i = 0; i < n_pts; ++i)
        if (!dominated[i]) d.pareto_set.push_back(points[i]);

    // Range normalization over the feasible set.
    std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const ParetoPoint& p : points) {
        const auto o = obj(p);
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], o[i]);
            hi[i] = std::max(hi[i], o[i]);
        }
    }
    auto scalarized = [&](const ParetoPoint& p) {
        const auto o = obj(p);
        const double w[3] = {problem.weight_energy, problem.weight_pitch, problem.weight_contact};
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double range = hi[i] - lo[i];
            const double norm = (range > 0.0) ? (o[i] - lo[i]) / range : 0.0;
            s += w[i] * norm;
        }
        return s;
    };

    // A scalarized optimum with nonnegative weights is nondominated when
    // restricted to the Pareto set; ties break to the smaller cAV (the
    // Pareto set is already cAV-ascending).
    const ParetoPoint* best = nullptr;
    double best_value = 1e300;
    for (const ParetoPoint& p : d.pareto_set) {
        const double v = scalarized(p);
        if (v < best_value) { best_value = v; best = &p; }
    }
    d.feasible = true;
    d.cAV_star = best->cAV;
    d.predicted_delta_Ec = best->delta_Ec;
    d.predicted_pitch_rate = best->pitch_rate;
    d.predicted_cdwo = best->cdwo;
    d.decision_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return d;
}

std::string decision_to_json(const StrategyDecision& d) {
    json j;
    j["cAV_star"] = d.cAV_star;
    j["tau_command"] = d.tau_command;
    j["predicted"] = {{"delta_Ec", d.predicted_delta_Ec},
                      {"pitch_rate", d.predicted_pitch_rate},
                      {"cdwo", d.predicted_cdwo}};
    j["feasible"] = d.feasible;
    j["time_budget_s"] = d.time_budget;
    j["decision_time_s"] = d.decision_time;
    json pareto = json::array();
    for (const ParetoPoint& p : d.pareto_set)
        pareto.push_back({{"cAV", p.cAV},
                          {"delta_Ec", p.delta_Ec},
                          {"pitch_rate", p.pitch_rate},
                          {"cdwo", p.cdwo}});
    j["pareto_set"] = pareto;
    return j.dump(2) + "\n";
}

} // namespace crossing_lab
