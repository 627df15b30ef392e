#include "levy/model.hpp"

#include "levy/errors.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

namespace levy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Value, gradient and Hessian of the jump MGF M(lambda) = E e^{<lambda, J>}.
struct MgfTerms {
    double value = 1.0;
    Vector gradient;
    Matrix hessian;
};

double jump_margin(const JumpLaw& law, const Vector& lam) {
    return std::visit(Overloaded{
                          [&](const ExponentialAlong& e) { return e.rate - e.direction.dot(lam); },
                          [](const GaussianJump&) { return kInf; },
                          [](const PointMasses&) { return kInf; },
                      },
                      law);
}

double mgf_value(const JumpLaw& law, const Vector& lam) {
    return std::visit(Overloaded{
                          [&](const ExponentialAlong& e) {
                              return e.rate / (e.rate - e.direction.dot(lam));
                          },
                          [&](const GaussianJump& g) {
                              return std::exp(g.mean.dot(lam) + 0.5 * lam.dot(g.cov * lam));
                          },
                          [&](const PointMasses& p) {
                              double m = 0.0;
                              for (const auto& a : p.atoms) m += a.prob * std::exp(a.point.dot(lam));
                              return m;
                          },
                      },
                      law);
}

MgfTerms mgf_terms(const JumpLaw& law, const Vector& lam) {
    const auto d = lam.size();
    MgfTerms t;
    std::visit(Overloaded{
                   [&](const ExponentialAlong& e) {
                       const double gap = e.rate - e.direction.dot(lam);
                       t.value = e.rate / gap;
                       t.gradient = (e.rate / (gap * gap)) * e.direction;
                       t.hessian = (2.0 * e.rate / (gap * gap * gap)) * e.direction * e.direction.transpose();
                   },
                   [&](const GaussianJump& g) {
                       t.value = std::exp(g.mean.dot(lam) + 0.5 * lam.dot(g.cov * lam));
                       const Vector shift = g.mean + g.cov * lam;
                       t.gradient = t.value * shift;
                       t.hessian = t.value * (shift * shift.transpose() + g.cov);
                   },
                   [&](const PointMasses& p) {
                       t.value = 0.0;
                       t.gradient = Vector::Zero(d);
                       t.hessian = Matrix::Zero(d, d);
                       for (const auto& a : p.atoms) {
                           const double w = a.prob * std::exp(a.point.dot(lam));
                           t.value += w;
                           t.gradient += w * a.point;
                           t.hessian += w * a.point * a.point.transpose();
                       }
                   },
               },
               law);
    return t;
}

void require_dim(const LevyModel& model, const Vector& lam) {
    if (lam.size() != model.dim()) {
        std::ostringstream os;
        os << "vector of size " << lam.size() << " does not match model dimension " << model.dim();
        throw DomainError(os.str());
    }
}

void validate_law(const JumpLaw& law, Eigen::Index d) {
    std::visit(Overloaded{
                   [&](const ExponentialAlong& e) {
                       if (e.direction.size() != d) throw DomainError("exp_along direction has wrong size");
                       if (e.direction.norm() == 0.0) throw DomainError("exp_along direction must be nonzero");
                       if (!(e.rate > 0.0)) throw DomainError("exp_along rate must be positive");
                   },
                   [&](const GaussianJump& g) {
                       if (g.mean.size() != d || g.cov.rows() != d || g.cov.cols() != d)
                           throw DomainError("gaussian jump parameters have wrong shape");
                   },
                   [&](const PointMasses& p) {
                       if (p.atoms.empty()) throw DomainError("points law needs at least one atom");
                       double total = 0.0;
                       for (const auto& a : p.atoms) {
                           if (a.point.size() != d) throw DomainError("point atom has wrong size");
                           if (!(a.prob >= 0.0)) throw DomainError("point atom probability must be nonnegative");
                           total += a.prob;
                       }
                       if (std::abs(total - 1.0) > 1e-12) throw DomainError("point atom probabilities must sum to 1");
                   },
               },
               law);
}

}  // namespace

Matrix checked_psd(const Matrix& m, const char* what, double floor) {
    if (m.rows() != m.cols()) throw DomainError(std::string(what) + " must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError(std::string(what) + " must be symmetric");
    const Matrix sym = 0.5 * (m + m.transpose());
    if (sym.size() == 0) return sym;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < -floor) {
        std::ostringstream os;
        os << what << " is not positive semidefinite (min eigenvalue " << lo << ")";
        throw DomainError(os.str());
    }
    if (lo >= 0.0) return sym;
    std::clog << "warning: clamping negative eigenvalue " << lo << " of " << what << " to 0\n";
    const Vector clamped = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
}

LevyModel::LevyModel(Vector drift, Matrix cov, std::optional<JumpComponent> jumps)
    : drift_(std::move(drift)), jumps_(std::move(jumps)) {
    const auto d = drift_.size();
    if (d < 1) throw DomainError("model dimension must be at least 1");
    if (cov.rows() != d || cov.cols() != d) throw DomainError("cov shape does not match drift");
    cov_ = checked_psd(cov, "cov");
    if (jumps_) {
        if (!(jumps_->intensity > 0.0)) throw DomainError("jump intensity must be positive");
        validate_law(jumps_->law, d);
        if (auto* g = std::get_if<GaussianJump>(&jumps_->law)) g->cov = checked_psd(g->cov, "jump cov");
    }
}

LevyModel LevyModel::brownian(Vector drift, Matrix cov) {
    return LevyModel(std::move(drift), std::move(cov));
}

DomainCheck in_domain(const LevyModel& model, const Vector& lam) {
    require_dim(model, lam);
    if (!model.jumps()) return {true, kInf};
    const double margin = jump_margin(model.jumps()->law, lam);
    return {margin > 0.0, margin};
}

double cumulant(const LevyModel& model, const Vector& lam) {
    require_dim(model, lam);
    double k = model.drift().dot(lam) + 0.5 * lam.dot(model.cov() * lam);
    if (const auto& j = model.jumps()) {
        if (!(jump_margin(j->law, lam) > 0.0)) return kInf;
        k += j->intensity * (mgf_value(j->law, lam) - 1.0);
    }
    return k;
}

CumulantDerivatives cumulant_derivatives(const LevyModel& model, const Vector& lam) {
    const auto dom = in_domain(model, lam);
    if (!dom.inside) {
        std::ostringstream os;
        os << "tilt outside the interior of the MGF domain (margin " << dom.margin << ")";
        throw DomainError(os.str());
    }
    CumulantDerivatives out{model.drift() + model.cov() * lam, model.cov()};
    if (const auto& j = model.jumps()) {
        const auto t = mgf_terms(j->law, lam);
        out.gradient += j->intensity * t.gradient;
        out.hessian += j->intensity * t.hessian;
    }
    return out;
}

Vector mean(const LevyModel& model) {
    Vector m = model.drift();
    if (const auto& j = model.jumps()) {
        m += j->intensity * std::visit(Overloaded{
                                           [](const ExponentialAlong& e) -> Vector { return e.direction / e.rate; },
                                           [](const GaussianJump& g) -> Vector { return g.mean; },
                                           [&](const PointMasses& p) -> Vector {
                                               Vector s = Vector::Zero(model.dim());
                                               for (const auto& a : p.atoms) s += a.prob * a.point;
                                               return s;
                                           },
                                       },
                                       j->law);
    }
    return m;
}

LevyModel scale_time(const LevyModel& model, double delta) {
    if (!(delta > 0.0)) throw DomainError("time scale delta must be positive");
    std::optional<JumpComponent> jumps = model.jumps();
    if (jumps) jumps->intensity *= delta;
    return LevyModel(model.drift() * delta, model.cov() * delta, std::move(jumps));
}

LevyModel tilt_model(const LevyModel& model, const Vector& tilt) {
    const auto dom = in_domain(model, tilt);
    if (!dom.inside) throw DomainError("tilt outside the interior of the MGF domain");
    Vector drift = model.drift() + model.cov() * tilt;
    std::optional<JumpComponent> jumps;
    if (const auto& j = model.jumps()) {
        jumps = std::visit(
            Overloaded{
                [&](const ExponentialAlong& e) {
                    const double rate = e.rate - e.direction.dot(tilt);
                    return JumpComponent{j->intensity * e.rate / rate, ExponentialAlong{e.direction, rate}};
                },
                [&](const GaussianJump& g) {
                    const double m = std::exp(g.mean.dot(tilt) + 0.5 * tilt.dot(g.cov * tilt));
                    return JumpComponent{j->intensity * m, GaussianJump{g.mean + g.cov * tilt, g.cov}};
                },
                [&](const PointMasses& p) {
                    const double m = mgf_value(p, tilt);
                    PointMasses tilted;
                    for (const auto& a : p.atoms)
                        tilted.atoms.push_back({a.point, a.prob * std::exp(a.point.dot(tilt)) / m});
                    // Renormalise so the sum-to-one check holds after rounding.
                    double total = 0.0;
                    for (const auto& a : tilted.atoms) total += a.prob;
                    for (auto& a : tilted.atoms) a.prob /= total;
                    return JumpComponent{j->intensity * m, std::move(tilted)};
                },
            },
            j->law);
    }
    return LevyModel(std::move(drift), model.cov(), std::move(jumps));
}

}  // namespace levy
