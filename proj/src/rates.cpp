#include "levy/rates.hpp"

#include "levy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace levy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest eigenvalue of the Hessian relative to the largest below which the
// cumulant is treated as flat in some direction.
constexpr double kSingularRatio = 1e-14;

bool is_singular(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    return !(hi > 0.0) || lo <= kSingularRatio * hi;
}

std::string describe(const Vector& v) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

double objective(const LevyModel& model, const Vector& alpha, const Vector& lam) {
    return alpha.dot(lam) - cumulant(model, lam);
}

// Largest t in (0, 1] keeping the domain margin at lam + t*step above 10% of the
// current margin; the margin is affine in lam for every supported jump law.
double margin_step(const LevyModel& model, const Vector& lam, const Vector& step) {
    const auto here = in_domain(model, lam);
    if (!std::isfinite(here.margin)) return 1.0;
    const auto there = in_domain(model, lam + step);
    const double drop = here.margin - there.margin;
    if (drop <= 0.0 || there.margin >= 0.1 * here.margin) return 1.0;
    return 0.9 * here.margin / drop;
}

}  // namespace

OrthantTarget::OrthantTarget(Vector vertex) : vertex_(std::move(vertex)) {
    if (vertex_.size() < 1) throw DomainError("orthant vertex must be nonempty");
    for (Eigen::Index i = 0; i < vertex_.size(); ++i)
        if (!(vertex_[i] > 0.0)) throw DomainError("orthant vertex must have strictly positive components");
}

LegendreSolution legendre(const LevyModel& model, const Vector& alpha, const ToleranceProfile& tol,
                          const std::optional<Vector>& start) {
    if (alpha.size() != model.dim()) throw DomainError("alpha has wrong dimension");
    LegendreSolution sol;
    sol.alpha = alpha;
    Vector lam = start ? *start : Vector::Zero(model.dim());
    if (!in_domain(model, lam).inside) lam.setZero();
    const double target = tol.newton_tol * (1.0 + alpha.norm());

    for (int it = 0; it <= tol.max_iter; ++it) {
        const auto der = cumulant_derivatives(model, lam);
        const Vector grad = alpha - der.gradient;
        const double phi = alpha.dot(lam) - cumulant(model, lam);
        sol.conjugate = lam;
        sol.lambda_value = phi;
        sol.residual = grad.norm();
        if (sol.residual <= target) {
            // One unguarded Newton step usually takes the residual to rounding level.
            if (!is_singular(der.hessian)) {
                const Vector polished = lam + der.hessian.ldlt().solve(grad);
                if (in_domain(model, polished).inside) {
                    const double res = (alpha - cumulant_derivatives(model, polished).gradient).norm();
                    if (res < sol.residual) {
                        sol.conjugate = polished;
                        sol.residual = res;
                        sol.lambda_value = objective(model, alpha, polished);
                    }
                }
            }
            sol.lambda_value = std::max(sol.lambda_value, 0.0);
            return sol;
        }
        if (it == tol.max_iter) break;

        if (is_singular(der.hessian)) {
            if (it == 0)
                throw DegenerateModel("cumulant Hessian is singular at " + describe(lam) +
                                      "; the increment law is supported on a hyperplane");
            sol.in_cramer_range = false;
            return sol;
        }
        const Vector step = der.hessian.ldlt().solve(grad);
        double t = margin_step(model, lam, step);
        const double slope = grad.dot(step);
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            const Vector trial = lam + t * step;
            if (!in_domain(model, trial).inside) continue;
            const double next = objective(model, alpha, trial);
            if (next >= phi + 1e-4 * t * slope - 1e-15 * (1.0 + std::abs(phi))) {
                lam = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        // The ascent path escapes when alpha is outside the range of grad K.
        const auto dom = in_domain(model, lam);
        if (lam.norm() > 1e12 || dom.margin < 1e-12 * (1.0 + lam.norm())) {
            sol.conjugate = lam;
            sol.lambda_value = objective(model, alpha, lam);
            sol.residual = (alpha - cumulant_derivatives(model, lam).gradient).norm();
            sol.in_cramer_range = false;
            return sol;
        }
    }
    std::ostringstream os;
    os << "Legendre transform at alpha=" << describe(alpha) << " did not converge: last iterate "
       << describe(lam) << ", residual " << sol.residual;
    throw NoConvergence(os.str());
}

SecondRateSolution second_rate(const LevyModel& model, const Vector& v, const ToleranceProfile& tol) {
    if (v.size() != model.dim()) throw DomainError("v has wrong dimension");
    if (v.norm() == 0.0) throw DomainError("second rate function needs v != 0");

    std::optional<Vector> warm;
    auto solve_at = [&](double u) -> std::optional<LegendreSolution> {
        try {
            auto sol = legendre(model, v / u, tol, warm);
            if (!sol.in_cramer_range) return std::nullopt;
            warm = sol.conjugate;
            return sol;
        } catch (const NoConvergence&) {
            return std::nullopt;
        }
    };
    auto scaled_rate = [&](double log_u) {
        const double u = std::exp(log_u);
        const auto sol = solve_at(u);
        return sol ? u * sol->lambda_value : kInf;
    };

    // Golden section on log u; u -> u Lambda(v/u) is convex (a perspective function).
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(tol.bracket_lo);
    double b = std::log(tol.bracket_hi);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = scaled_rate(c);
    double fd = scaled_rate(d);
    while (b - a > 1e-4) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = scaled_rate(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = scaled_rate(d);
        }
    }
    const double log_lo = std::log(tol.bracket_lo);
    const double log_hi = std::log(tol.bracket_hi);
    if (a - log_lo < 1e-3 || log_hi - b < 1e-3 || !std::isfinite(std::min(fc, fd))) {
        std::ostringstream os;
        os << "u Lambda(v/u) for v=" << describe(v) << " has no interior minimum in [" << tol.bracket_lo << ", "
           << tol.bracket_hi << "] (search ended near u=" << std::exp(0.5 * (a + b)) << ")";
        throw NoFiniteMinimum(os.str());
    }

    // Refine on the stationarity condition f(u) = K(lambda(v/u)) = 0; f is decreasing in u
    // with f'(u) = -alpha^T H^{-1} alpha / u.
    struct Eval {
        double f;
        double df;
        LegendreSolution sol;
    };
    auto eval = [&](double u) -> std::optional<Eval> {
        auto sol = solve_at(u);
        if (!sol) return std::nullopt;
        const auto der = cumulant_derivatives(model, sol->conjugate);
        const Vector alpha = v / u;
        const double f = cumulant(model, sol->conjugate);
        const double df = -alpha.dot(der.hessian.ldlt().solve(alpha)) / u;
        return Eval{f, df, std::move(*sol)};
    };

    double u = std::exp(0.5 * (a + b));
    auto cur = eval(u);
    if (!cur) throw NoFiniteMinimum("Legendre transform failed at the golden-section minimum");
    double lo = u, hi = u;
    auto flo = cur, fhi = cur;
    for (int k = 0; k < 200 && flo->f < 0.0; ++k) {
        lo /= 1.1;
        flo = eval(lo);
        if (!flo) throw NoFiniteMinimum("Legendre transform failed while bracketing the optimal scale");
    }
    for (int k = 0; k < 200 && fhi->f > 0.0; ++k) {
        hi *= 1.1;
        fhi = eval(hi);
        if (!fhi) throw NoFiniteMinimum("Legendre transform failed while bracketing the optimal scale");
    }
    if (flo->f < 0.0 || fhi->f > 0.0) throw NoFiniteMinimum("stationarity condition has no sign change");

    for (int it = 0; it < tol.max_iter && std::abs(cur->f) > tol.root_tol; ++it) {
        double next = u - cur->f / cur->df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        u = next;
        cur = eval(u);
        if (!cur) throw NoFiniteMinimum("Legendre transform failed during refinement");
        if (cur->f > 0.0)
            lo = u;
        else
            hi = u;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * u) break;
    }

    SecondRateSolution out;
    out.v = v;
    out.u_star = u;
    out.tilt = cur->sol.conjugate;
    out.d_value = u * cur->sol.lambda_value;
    out.k_residual = std::abs(cur->f);
    return out;
}

MppSolution orthant_mpp(const LevyModel& model, const OrthantTarget& target, double r, const ToleranceProfile& tol) {
    if (target.dim() != model.dim()) throw DomainError("target dimension does not match model");
    if (!(r > 0.0)) throw DomainError("scale r must be positive");
    const Vector corner = r * target.vertex();
    const auto leg = legendre(model, corner, tol);
    if (!leg.in_cramer_range)
        throw DomainError("vertex r g = " + describe(corner) + " is outside the Cramer range");

    MppSolution out;
    out.r = r;
    if ((leg.conjugate.array() > 0.0).all()) {
        out.point = corner;
        out.vertex_is_mpp = true;
        out.normal = leg.conjugate;
        out.rate_value = leg.lambda_value;
        return out;
    }

    // Lambda(r G) = sup_{lambda >= 0} <r g, lambda> - K(lambda); the MPP is grad K at the
    // maximiser. Projected coordinate ascent with one-dimensional Newton steps.
    Vector lam = leg.conjugate.cwiseMax(0.0);
    const double target_pg = 1e-9 * (1.0 + corner.norm());
    const int max_sweeps = 100 * tol.max_iter;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int j = 0; j < model.dim(); ++j) {
            const auto der = cumulant_derivatives(model, lam);
            const double grad = corner[j] - der.gradient[j];
            const double curv = der.hessian(j, j);
            if (lam[j] <= 0.0 && grad <= 0.0) continue;
            double step = curv > 0.0 ? grad / curv : grad;
            step = std::max(step, -lam[j]);
            const double phi = objective(model, corner, lam);
            Vector dir = Vector::Zero(model.dim());
            dir[j] = step;
            double t = margin_step(model, lam, dir);
            for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
                Vector trial = lam;
                trial[j] = std::max(lam[j] + t * step, 0.0);
                if (!in_domain(model, trial).inside) continue;
                if (objective(model, corner, trial) >= phi - 1e-15 * (1.0 + std::abs(phi))) {
                    lam = trial;
                    break;
                }
            }
        }
        const Vector grad = corner - cumulant_derivatives(model, lam).gradient;
        double pg = 0.0;
        for (int j = 0; j < model.dim(); ++j) {
            const double g = lam[j] > 0.0 ? grad[j] : std::max(grad[j], 0.0);
            pg = std::max(pg, std::abs(g));
        }
        if (pg <= target_pg) break;
    }
    out.point = cumulant_derivatives(model, lam).gradient;
    out.vertex_is_mpp = false;
    out.normal = lam;
    out.rate_value = objective(model, corner, lam);
    return out;
}

double vertex_scale_root(const LevyModel& model, const OrthantTarget& target, const ToleranceProfile& tol) {
    if (target.dim() != model.dim()) throw DomainError("target dimension does not match model");
    const Vector& g = target.vertex();
    std::optional<Vector> warm;

    struct Eval {
        double h;
        double dh;
    };
    // h(r) = K(lambda(r g)), h'(r) = r g^T H^{-1} g.
    auto eval = [&](double r) -> Eval {
        const auto sol = legendre(model, r * g, tol, warm);
        if (!sol.in_cramer_range) {
            std::ostringstream os;
            os << "r g left the Cramer range at r=" << r << " before K(lambda(r g)) changed sign";
            throw NoRoot(os.str());
        }
        warm = sol.conjugate;
        const auto der = cumulant_derivatives(model, sol.conjugate);
        return {cumulant(model, sol.conjugate), r * g.dot(der.hessian.ldlt().solve(g))};
    };

    double r = std::clamp(1.0, tol.bracket_lo, tol.bracket_hi);
    Eval cur = eval(r);
    double lo = r, hi = r;
    if (cur.h < 0.0) {
        Eval e = cur;
        while (e.h < 0.0) {
            lo = hi;
            if (hi >= tol.bracket_hi) throw NoRoot("K(lambda(r g)) stays negative up to the bracket end");
            hi = std::min(2.0 * hi, tol.bracket_hi);
            e = eval(hi);
        }
    } else if (cur.h > 0.0) {
        Eval e = cur;
        while (e.h > 0.0) {
            hi = lo;
            if (lo <= tol.bracket_lo) throw NoRoot("K(lambda(r g)) stays positive down to the bracket start");
            lo = std::max(0.5 * lo, tol.bracket_lo);
            e = eval(lo);
        }
    } else {
        return r;
    }

    // Newton safeguarded by bisection on [lo, hi] with h(lo) < 0 < h(hi).
    r = 0.5 * (lo + hi);
    cur = eval(r);
    for (int it = 0; it < tol.max_iter; ++it) {
        if (std::abs(cur.h) <= tol.root_tol) return r;
        if (cur.h < 0.0)
            lo = r;
        else
            hi = r;
        double next = cur.dh > 0.0 ? r - cur.h / cur.dh : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        r = next;
        cur = eval(r);
    }
    if (std::abs(cur.h) <= tol.root_tol) return r;
    std::ostringstream os;
    os << "root of K(lambda(r g)) not resolved to " << tol.root_tol << " (|K| = " << std::abs(cur.h) << " at r=" << r
       << ")";
    throw NoRoot(os.str());
}

double most_probable_scale(const LevyModel& model, const OrthantTarget& target, const ToleranceProfile& tol) {
    const double r = vertex_scale_root(model, target, tol);
    const auto mpp = orthant_mpp(model, target, r, tol);
    if (!mpp.vertex_is_mpp) {
        std::ostringstream os;
        os << "vertex r g is not the most probable point of r G at r=" << r << " (conjugate "
           << describe(legendre(model, r * target.vertex(), tol).conjugate) << ")";
        throw VertexNotMpp(os.str());
    }
    return r;
}

Vector normal_at(const LevyModel& model, const OrthantTarget& target, double r, const ToleranceProfile& tol) {
    const auto mpp = orthant_mpp(model, target, r, tol);
    if (!mpp.vertex_is_mpp) throw VertexNotMpp("vertex r g is not the most probable point of r G");
    return mpp.normal;
}

}  // namespace levy
