#include "levy/asympt.hpp"

#include "levy/errors.hpp"

#include <cmath>
#include <iostream>

namespace levy {
namespace {

constexpr double kZ95 = 1.959963984540054;

double polynomial(int dim, double s) { return std::pow(s, -0.5 * (dim - 1)); }

}  // namespace

Prediction predict(const ConditionReport& report, int dim, double s) {
    if (report.c3.overall != Verdict::holds || !report.d_of_g)
        throw ConditionError(std::string("asymptotic prediction needs c3 to hold: ") + report.c3.reason);
    if (!(s > 0.0)) throw DomainError("s must be positive");
    const double d = *report.d_of_g;
    return {std::exp(-s * d), polynomial(dim, s), d};
}

Prediction predict(const LevyModel& model, const OrthantTarget& target, double s, const ToleranceProfile& tol) {
    return predict(check_conditions(model, target, tol), model.dim(), s);
}

AsymptoticFit fit_a0(const std::vector<HitEstimate>& records, double d_of_g, int dim) {
    AsymptoticFit fit;
    for (const auto& r : records) {
        if (r.p_hat > 0.0 && std::isfinite(r.std_err) && r.std_err > 0.0) {
            fit.records.push_back(r);
        } else if (r.p_hat <= 0.0) {
            std::clog << "warning: excluding record at s=" << r.s << " with p_hat = 0 from the fit\n";
            fit.excluded_s.push_back(r.s);
        } else {
            std::clog << "warning: excluding record at s=" << r.s << " without a usable standard error\n";
            fit.excluded_s.push_back(r.s);
        }
    }
    if (fit.records.size() < 3) throw FitError("need at least 3 records with p_hat > 0 and a finite standard error");

    // Normal equations for y = b0 + b1 s.
    double sw = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (const auto& r : fit.records) {
        const double w = std::pow(r.p_hat / r.std_err, 2);
        const double y = std::log(r.p_hat) + r.s * d_of_g + 0.5 * (dim - 1) * std::log(r.s);
        sw += w;
        sx += w * r.s;
        sxx += w * r.s * r.s;
        sy += w * y;
        sxy += w * r.s * y;
        fit.per_s_ratio.emplace_back(r.s, r.p_hat / (polynomial(dim, r.s) * std::exp(-r.s * d_of_g)));
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 1e-12 * sw * sxx)) throw FitError("degenerate design: the records do not span distinct s values");
    const double b0 = (sxx * sy - sx * sxy) / det;
    const double b1 = (sw * sxy - sx * sy) / det;
    const double se0 = std::sqrt(sxx / det);
    const double se1 = std::sqrt(sw / det);

    fit.a0_hat = std::exp(b0);
    fit.a0_ci95 = {std::exp(b0 - kZ95 * se0), std::exp(b0 + kZ95 * se0)};
    fit.shape_slope = b1;
    fit.shape_slope_ci95 = {b1 - kZ95 * se1, b1 + kZ95 * se1};
    return fit;
}

}  // namespace levy
