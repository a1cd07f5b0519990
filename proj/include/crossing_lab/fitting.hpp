#ifndef CROSSING_LAB_FITTING_HPP
#define CROSSING_LAB_FITTING_HPP

#include <string>
#include <utility>
#include <vector>

#include "crossing_lab/campaign.hpp"

namespace crossing_lab {

enum class Metric { DeltaEc, PitchRate, Cdwo };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

/// Monomial basis in (vc, cAV): ordered (power of vc, power of cAV) pairs.
struct SurfaceSpec {
    Metric metric = Metric::DeltaEc;
    std::vector<std::pair<int, int>> basis;

    /// The published polynomial form for each metric: 5 terms for the
    /// kinetic-energy variation, 9 for pitch rate, 9 for contact duration.
    static SurfaceSpec for_metric(Metric m);
};

enum class Scaling { Raw, Standardized };

struct FittedSurface {
    SurfaceSpec spec;
    double hO = 0.0;
    std::vector<double> coefficients; // raw units, ordered like the basis
    double r_squared = 0.0;
    double rmse = 0.0;
    double condition_number = 0.0;
    int n_points = 0;
};

struct FitPoint {
    double vc = 0.0;
    double cAV = 0.0;
    double value = 0.0;
};

/// Ordinary least squares via orthogonal (QR) factorization. Standardized
/// scaling fits on centered/scaled regressors and back-transforms the
/// coefficients to raw units; predictions are identical either way.
FittedSurface fit_surface(const std::vector<FitPoint>& points, const SurfaceSpec& spec,
                          Scaling scaling = Scaling::Standardized, double hO = 0.0);

double evaluate_surface(const FittedSurface& surface, double vc, double cAV);

struct FitReportOptions {
    Scaling scaling = Scaling::Standardized;
    /// When > 0, trials with dx_w_max >= (8/3) * stroke_limit are flagged
    /// and excluded from the fits (off by default).
    bool exclude_stroke_violations = false;
    double stroke_limit = 0.05;
};

struct FitReportEntry {
    FittedSurface surface;
    bool ok = false;
    std::string error;
    int n_excluded = 0;
};

/// One surface per (metric, hO level): 3 x |hO levels| entries, each fitted
/// independently; per-cell failures are reported, not fatal.
std::vector<FitReportEntry> fit_report(const CampaignResult& campaign,
                                       const FitReportOptions& options = {});

/// JSON array export {metric, hO_m, basis, coefficients, r2, rmse, n}.
std::string surfaces_to_json(const std::vector<FitReportEntry>& report);
std::vector<FittedSurface> surfaces_from_json(const std::string& text);

} // namespace crossing_lab

#endif
