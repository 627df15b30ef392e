#pragma once

#include "levy/model.hpp"

#include <optional>

namespace levy {

struct ToleranceProfile {
    double newton_tol = 1e-10;  // relative residual of grad K(lambda) = alpha
    double root_tol = 1e-10;    // |K| at scalar roots; positivity threshold for normals
    int max_iter = 200;
    double bracket_lo = 1e-6;
    double bracket_hi = 1e6;
};

// Lambda(alpha) = sup_lambda <alpha, lambda> - K(lambda) and its maximiser.
struct LegendreSolution {
    Vector alpha;
    double lambda_value = 0.0;
    Vector conjugate;
    double residual = 0.0;
    // false when the maximising path runs to the domain boundary or to infinity;
    // lambda_value is then the last (lower) value along that path.
    bool in_cramer_range = true;
};

// D(v) = inf_{u>0} u Lambda(v/u).
struct SecondRateSolution {
    Vector v;
    double d_value = 0.0;
    double u_star = 0.0;
    Vector tilt;
    double k_residual = 0.0;
};

// Vertex g of G = g + Q+, all components strictly positive.
class OrthantTarget {
public:
    explicit OrthantTarget(Vector vertex);
    const Vector& vertex() const { return vertex_; }
    int dim() const { return static_cast<int>(vertex_.size()); }

private:
    Vector vertex_;
};

struct MppSolution {
    double r = 0.0;
    Vector point;
    bool vertex_is_mpp = false;
    Vector normal;
    double rate_value = 0.0;  // Lambda(r G)
};

LegendreSolution legendre(const LevyModel& model, const Vector& alpha, const ToleranceProfile& tol = {},
                          const std::optional<Vector>& start = std::nullopt);

SecondRateSolution second_rate(const LevyModel& model, const Vector& v, const ToleranceProfile& tol = {});

MppSolution orthant_mpp(const LevyModel& model, const OrthantTarget& target, double r,
                        const ToleranceProfile& tol = {});

// Root of r -> K(lambda(r g)); does not check that the vertex is an MPP.
double vertex_scale_root(const LevyModel& model, const OrthantTarget& target, const ToleranceProfile& tol = {});

// r_G. Throws VertexNotMpp when the vertex certificate fails at the root.
double most_probable_scale(const LevyModel& model, const OrthantTarget& target, const ToleranceProfile& tol = {});

// N(r) = lambda(r g). Throws VertexNotMpp when r g is not the MPP of r G.
Vector normal_at(const LevyModel& model, const OrthantTarget& target, double r, const ToleranceProfile& tol = {});

}  // namespace levy
