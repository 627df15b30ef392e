#pragma once

#include "levy/conditions.hpp"
#include "levy/sim.hpp"

#include <utility>
#include <vector>

namespace levy {

struct Prediction {
    double exponential_factor = 0.0;  // e^{-s D(G)}
    double polynomial_factor = 0.0;   // s^{-(d-1)/2}
    double d_of_g = 0.0;
};

struct AsymptoticFit {
    std::vector<HitEstimate> records;  // the records used in the fit
    double a0_hat = 0.0;
    std::pair<double, double> a0_ci95;
    double shape_slope = 0.0;
    std::pair<double, double> shape_slope_ci95;
    std::vector<std::pair<double, double>> per_s_ratio;  // (s, p_hat / (s^{-(d-1)/2} e^{-s D}))
    std::vector<double> excluded_s;                      // records dropped for p_hat = 0
};

// Throws ConditionError unless the report says c3 holds.
Prediction predict(const ConditionReport& report, int dim, double s);
Prediction predict(const LevyModel& model, const OrthantTarget& target, double s, const ToleranceProfile& tol = {});

// Weighted least squares of ln p_hat + s D + ((d-1)/2) ln s = ln A0 + slope * s with
// weights (p_hat / std_err)^2. Throws FitError with fewer than three usable records.
AsymptoticFit fit_a0(const std::vector<HitEstimate>& records, double d_of_g, int dim);

}  // namespace levy
