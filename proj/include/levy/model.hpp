#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace levy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Jump C * direction with C ~ Exponential(rate).
struct ExponentialAlong {
    Vector direction;
    double rate = 1.0;
};

struct GaussianJump {
    Vector mean;
    Matrix cov;
};

struct PointMass {
    Vector point;
    double prob = 0.0;
};

struct PointMasses {
    std::vector<PointMass> atoms;
};

using JumpLaw = std::variant<ExponentialAlong, GaussianJump, PointMasses>;

struct JumpComponent {
    double intensity = 0.0;
    JumpLaw law;
};

// Membership of a tilt vector in the domain where the MGF of X(1) is finite.
// margin is the distance-like slack to the boundary (+inf when the MGF is entire).
struct DomainCheck {
    bool inside = true;
    double margin = 0.0;
};

struct CumulantDerivatives {
    Vector gradient;
    Matrix hessian;
};

// Unit-time Levy triplet: drift, Brownian covariance and a compound Poisson part.
// Immutable after construction; the constructor validates shapes and PSD-ness.
class LevyModel {
public:
    LevyModel(Vector drift, Matrix cov, std::optional<JumpComponent> jumps = std::nullopt);

    int dim() const { return static_cast<int>(drift_.size()); }
    const Vector& drift() const { return drift_; }
    const Matrix& cov() const { return cov_; }
    const std::optional<JumpComponent>& jumps() const { return jumps_; }

    // Pure Brownian motion with drift.
    static LevyModel brownian(Vector drift, Matrix cov);

private:
    Vector drift_;
    Matrix cov_;
    std::optional<JumpComponent> jumps_;
};

// K(lambda) = ln E exp<lambda, X(1)>; +inf outside the domain.
double cumulant(const LevyModel& model, const Vector& lam);

// Analytic gradient and Hessian of K. Throws DomainError outside the open domain.
CumulantDerivatives cumulant_derivatives(const LevyModel& model, const Vector& lam);

Vector mean(const LevyModel& model);

DomainCheck in_domain(const LevyModel& model, const Vector& lam);

// Model whose unit-time law is the law of X(delta) of the input.
LevyModel scale_time(const LevyModel& model, double delta);

// Exponentially tilted model, law e^{<tilt,x> - K(tilt)} P(X(1) in dx), in the same family.
LevyModel tilt_model(const LevyModel& model, const Vector& tilt);

// Clamp tiny negative eigenvalues of a symmetric matrix. Throws DomainError when an
// eigenvalue is below -floor. `what` names the matrix in messages.
Matrix checked_psd(const Matrix& m, const char* what, double floor = 1e-10);

}  // namespace levy
