#include "crossing_lab/fitting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

namespace crossing_lab {

using nlohmann::json;

std::string to_string(Metric m) {
    switch (m) {
        case Metric::DeltaEc: return "delta_Ec";
        case Metric::PitchRate: return "pitch_rate";
        case Metric::Cdwo: return "cdwo";
    }
    return "delta_Ec";
}

Metric metric_from_string(const std::string& s) {
    if (s == "delta_Ec") return Metric::DeltaEc;
    if (s == "pitch_rate") return Metric::PitchRate;
    if (s == "cdwo") return Metric::Cdwo;
    throw ParseError("unknown metric '" + s + "'");
}

SurfaceSpec SurfaceSpec::for_metric(Metric m) {
    SurfaceSpec s;
    s.metric = m;
    switch (m) {
        case Metric::DeltaEc:
            s.basis = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}};
            break;
        case Metric::PitchRate:
            s.basis = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}};
            break;
        case Metric::Cdwo:
            s.basis = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {2, 1}, {1, 2}, {0, 3}};
            break;
    }
    return s;
}

namespace {

double monomial(const std::pair<int, int>& powers, double vc, double cAV) {
    return std::pow(vc, powers.first) * std::pow(cAV, powers.second);
}

} // namespace

FittedSurface fit_surface(const std::vector<FitPoint>& points, const SurfaceSpec& spec,
                          Scaling scaling, double hO) {
    const std::size_t n = points.size();
    const std::size_t k = spec.basis.size();
    if (n < k)
        throw std::invalid_argument("fit_surface: underdetermined (" + std::to_string(n) +
                                    " points for " + std::to_string(k) + " basis terms)");

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y(i) = points[i].value;
        for (std::size_t j = 0; j < k; ++j)
            X(i, j) = monomial(spec.basis[j], points[i].vc, points[i].cAV);
    }

    // Locate the constant column, if the basis has one.
    std::ptrdiff_t const_col = -1;
    for (std::size_t j = 0; j < k; ++j)
        if (spec.basis[j] == std::pair<int, int>{0, 0}) const_col = static_cast<std::ptrdiff_t>(j);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(k);
    Eigen::MatrixXd Xs = X;
    if (scaling == Scaling::Standardized) {
        for (std::size_t j = 0; j < k; ++j) {
            if (static_cast<std::ptrdiff_t>(j) == const_col) continue;
            mean(j) = X.col(j).mean();
            const double sd = std::sqrt((X.col(j).array() - mean(j)).square().sum() /
                                        static_cast<double>(n));
            if (sd > 0.0) scale(j) = sd;
            Xs.col(j) = (X.col(j).array() - mean(j)) / scale(j);
        }
    }

    bool all_identical = true;
    for (std::size_t j = 0; j < k && all_identical; ++j) {
        if (static_cast<std::ptrdiff_t>(j) == const_col) continue;
        if ((X.col(j).array() != X(0, j)).any()) all_identical = false;
    }
    if (all_identical && k > 1)
        throw std::invalid_argument("fit_surface: all regressors identical across points");

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    Eigen::VectorXd beta = qr.solve(y);

    // Back-transform to raw-unit coefficients.
    Eigen::VectorXd coeff = beta;
    if (scaling == Scaling::Standardized) {
        double const_shift = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (static_cast<std::ptrdiff_t>(j) == const_col) continue;
            coeff(j) = beta(j) / scale(j);
            const_shift += beta(j) * mean(j) / scale(j);
        }
        if (const_col >= 0) coeff(const_col) = beta(const_col) - const_shift;
    }

    const Eigen::VectorXd residual = y - X * coeff;
    const double ss_res = residual.squaredNorm();
    const double y_mean = y.mean();
    const double ss_tot = (y.array() - y_mean).square().sum();

    FittedSurface out;
    out.spec = spec;
    out.hO = hO;
    out.coefficients.assign(coeff.data(), coeff.data() + k);
    out.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    out.rmse = std::sqrt(ss_res / static_cast<double>(n));
    out.n_points = static_cast<int>(n);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    out.condition_number =
        (smin > 0.0) ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
    return out;
}

double evaluate_surface(const FittedSurface& surface, double vc, double cAV) {
    double v = 0.0;
    for (std::size_t j = 0; j < surface.spec.basis.size(); ++j)
        v += surface.coefficients[j] * monomial(surface.spec.basis[j], vc, cAV);
    return v;
}

std::vector<FitReportEntry> fit_report(const CampaignResult& campaign,
                                       const FitReportOptions& options) {
    std::vector<FitReportEntry> report;
    const double dxw_limit = (8.0 / 3.0) * options.stroke_limit;
    for (const Metric metric : {Metric::DeltaEc, Metric::PitchRate, Metric::Cdwo}) {
        const SurfaceSpec spec = SurfaceSpec::for_metric(metric);
        for (double hO : campaign.plan.hO_levels) {
            FitReportEntry entry;
            entry.surface.spec = spec;
            entry.surface.hO = hO;
            std::vector<FitPoint> pts;
            for (const TrialRecord& r : campaign.records) {
                if (r.hO != hO) continue;
                if (options.exclude_stroke_violations && r.dx_w_max >= dxw_limit) {
                    ++entry.n_excluded;
                    continue;
                }
                double value = 0.0;
                switch (metric) {
                    case Metric::DeltaEc: value = r.delta_Ec; break;
                    case Metric::PitchRate: value = r.pitch_rate_t2; break;
                    case Metric::Cdwo: value = r.cdwo; break;
                }
                pts.push_back({r.vc, r.cAV, value});
            }
            try {
                entry.surface = fit_surface(pts, spec, options.scaling, hO);
                entry.ok = true;
            } catch (const std::exception& e) {
                entry.error = e.what();
            }
            report.push_back(std::move(entry));
        }
    }
    return report;
}

std::string surfaces_to_json(const std::vector<FitReportEntry>& report) {
    json arr = json::array();
    for (const FitReportEntry& e : report) {
        json s;
        s["metric"] = to_string(e.surface.spec.metric);
        s["hO_m"] = e.surface.hO;
        json basis = json::array();
        for (const auto& [a, b] : e.surface.spec.basis) basis.push_back({a, b});
        s["basis"] = basis;
        if (e.ok) {
            s["coefficients"] = e.surface.coefficients;
            s["r2"] = e.surface.r_squared;
            s["rmse"] = e.surface.rmse;
            s["condition_number"] = e.surface.condition_number;
            s["n"] = e.surface.n_points;
        } else {
            s["error"] = e.error;
        }
        if (e.n_excluded > 0) s["n_excluded"] = e.n_excluded;
        arr.push_back(s);
    }
    return arr.dump(2) + "\n";
}

std::vector<FittedSurface> surfaces_from_json(const std::string& text) {
    const json arr = json::parse(text);
    std::vector<FittedSurface> out;
    for (const json& s : arr) {
        if (s.contains("error")) continue;
        FittedSurface f;
        f.spec.metric = metric_from_string(s.at("metric").get<std::string>());
        for (const json& b : s.at("basis"))
            f.spec.basis.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
        f.hO = s.at("hO_m").get<double>();
        f.coefficients = s.at("coefficients").get<std::vector<double>>();
        f.r_squared = s.at("r2").get<double>();
        f.rmse = s.at("rmse").get<double>();
        if (s.contains("condition_number"))
            f.condition_number = s.at("condition_number").get<double>();
        f.n_points = s.at("n").get<int>();
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace crossing_lab
