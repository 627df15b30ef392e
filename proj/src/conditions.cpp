#include "levy/conditions.hpp"

#include "levy/errors.hpp"

#include <cmath>
#include <sstream>
#include <variant>
#include <vector>

namespace levy {
namespace {

// Column space of a set of generators, as an orthonormal basis.
Matrix span_of(const std::vector<Vector>& gens, Eigen::Index d) {
    if (gens.empty()) return Matrix(d, 0);
    Matrix m(d, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = gens[i];
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > cut) ++rank;
    return svd.matrixU().leftCols(rank);
}

void add_columns(std::vector<Vector>& out, const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m.col(j));
}

Verdict combine(std::initializer_list<Verdict> parts) {
    bool unknown = false;
    for (auto v : parts) {
        if (v == Verdict::violated) return Verdict::violated;
        if (v == Verdict::unknown) unknown = true;
    }
    return unknown ? Verdict::unknown : Verdict::holds;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated: return "violated";
        case Verdict::unknown: return "unknown";
    }
    return "unknown";
}

bool ConditionReport::theorem_applies(bool assume_c1) const {
    const bool c1_ok = c1.verdict == Verdict::holds || (assume_c1 && c1.verdict == Verdict::unknown);
    return c1_ok && c2.verdict == Verdict::holds && c3.overall == Verdict::holds;
}

VerdictWithReason check_c1(const LevyModel& model) {
    const Eigen::Index d = model.dim();
    // Directions along which X(1), conditionally on the number of jumps, has a density,
    // and the linear span of all possible displacements from the drift.
    std::vector<Vector> dense;
    std::vector<Vector> support;
    add_columns(dense, model.cov());
    add_columns(support, model.cov());
    if (const auto& j = model.jumps()) {
        if (const auto* e = std::get_if<ExponentialAlong>(&j->law)) {
            dense.push_back(e->direction);
            support.push_back(e->direction);
        } else if (const auto* g = std::get_if<GaussianJump>(&j->law)) {
            add_columns(dense, g->cov);
            add_columns(support, g->cov);
            support.push_back(g->mean);
        } else if (const auto* p = std::get_if<PointMasses>(&j->law)) {
            for (const auto& a : p->atoms)
                if (a.prob > 0.0) support.push_back(a.point);
        }
    }

    const auto dense_rank = span_of(dense, d).cols();
    if (dense_rank == d)
        return {Verdict::holds, "X(1) has an absolutely continuous component on R^" + std::to_string(d)};

    const Matrix basis = span_of(support, d);
    if (basis.cols() < d) {
        std::ostringstream os;
        os << "support of X(1) lies on the affine subspace drift + span{";
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            os << (c ? ", " : "") << "(";
            for (Eigen::Index i = 0; i < d; ++i) os << (i ? ", " : "") << basis(i, c);
            os << ")";
        }
        os << "} of dimension " << basis.cols() << " < " << d << ", contained in a hyperplane";
        return {Verdict::violated, os.str()};
    }
    return {Verdict::unknown,
            "support spans R^" + std::to_string(d) +
                " but no absolutely continuous component was found; lattice structure not decided"};
}

VerdictWithReason check_c2(const LevyModel& model) {
    const auto dom = in_domain(model, Vector::Zero(model.dim()));
    std::ostringstream os;
    if (dom.inside) {
        os << "0 is interior to the MGF domain (margin " << dom.margin << ")";
        return {Verdict::holds, os.str()};
    }
    os << "0 is not interior to the MGF domain (margin " << dom.margin << ")";
    return {Verdict::violated, os.str()};
}

ConditionReport check_conditions(const LevyModel& model, const OrthantTarget& target, const ToleranceProfile& tol) {
    ConditionReport rep;
    rep.c1 = check_c1(model);
    rep.c2 = check_c2(model);
    auto& c3 = rep.c3;
    try {
        if (target.dim() != model.dim()) throw DomainError("target dimension does not match model");
        const double r = vertex_scale_root(model, target, tol);
        rep.r_g = r;
        const auto leg = legendre(model, r * target.vertex(), tol);
        c3.rg_in_cramer_range = leg.in_cramer_range ? Verdict::holds : Verdict::violated;
        if (!leg.in_cramer_range) {
            c3.reason = "r_G g is outside the Cramer range";
        } else {
            const auto mpp = orthant_mpp(model, target, r, tol);
            c3.vertex_is_mpp = mpp.vertex_is_mpp ? Verdict::holds : Verdict::violated;
            rep.normal = mpp.normal;
            rep.d_of_g = mpp.rate_value / r;

            const Vector& n = mpp.normal;
            if ((n.array() > tol.root_tol).all())
                c3.normal_strictly_positive = Verdict::holds;
            else if ((n.array() < -tol.root_tol).any())
                c3.normal_strictly_positive = Verdict::violated;
            else
                c3.normal_strictly_positive = Verdict::unknown;

            rep.mean_inner = mean(model).dot(n);
            c3.drift_inner_product_negative = *rep.mean_inner < 0.0 ? Verdict::holds : Verdict::violated;

            if (!mpp.vertex_is_mpp)
                c3.reason = "vertex r_G g is not the most probable point of r_G G: lambda(r_G g) has a "
                            "non-positive component";
            else if (c3.normal_strictly_positive != Verdict::holds)
                c3.reason = "normal N(r_G) is not strictly inside the positive orthant";
            else if (c3.drift_inner_product_negative != Verdict::holds)
                c3.reason = "<E xi, N(r_G)> is not negative";
        }
    } catch (const Error& e) {
        c3.reason = e.what();
    }
    c3.overall = combine({c3.vertex_is_mpp, c3.rg_in_cramer_range, c3.normal_strictly_positive,
                          c3.drift_inner_product_negative});
    if (c3.overall == Verdict::holds) c3.reason = "vertex r_G g is the MPP with normal in Q+ and negative drift";
    return rep;
}

}  // namespace levy
