#pragma once

#include "levy/model.hpp"

#include <cstdint>
#include <random>

namespace fixtures {

using levy::Matrix;
using levy::Vector;

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// Brownian motion, drift (-1,-1), identity covariance.
inline levy::LevyModel bm() { return levy::LevyModel::brownian(vec({-1, -1}), Matrix::Identity(2, 2)); }

// Correlated Brownian motion, correlation 0.9.
inline levy::LevyModel correlated_bm() {
    Matrix cov(2, 2);
    cov << 1.0, 0.9, 0.9, 1.0;
    return levy::LevyModel::brownian(vec({-1, -1}), cov);
}

// Two-dimensional reserve process with claims split along c = (1,1), Exp(3) claims;
// drift parallel to c, so X(1) lives on the diagonal.
inline levy::LevyModel cl2_parallel() {
    return levy::LevyModel(vec({-1, -1}), Matrix::Zero(2, 2),
                           levy::JumpComponent{1.0, levy::ExponentialAlong{vec({1, 1}), 3.0}});
}

// Classical Cramer-Lundberg: premium 1, unit Poisson rate, Exp(2) claims.
// psi(u) = 0.5 e^{-u}, adjustment coefficient 1.
inline levy::LevyModel cl1() {
    return levy::LevyModel(vec({-1}), Matrix::Zero(1, 1),
                           levy::JumpComponent{1.0, levy::ExponentialAlong{vec({1}), 2.0}});
}

// Pure-jump 2-d model with Gaussian jumps and componentwise negative drift: the orthant
// can only be entered at jump epochs.
inline levy::LevyModel gaussian_jumps() {
    Matrix s(2, 2);
    s << 0.25, 0.05, 0.05, 0.25;
    return levy::LevyModel(vec({-1, -1}), Matrix::Zero(2, 2),
                           levy::JumpComponent{1.0, levy::GaussianJump{vec({0.5, 0.5}), s}});
}

// Jump diffusion: Brownian part plus exponential claims along the diagonal, drift off it.
inline levy::LevyModel jump_diffusion() {
    return levy::LevyModel(vec({-1, -0.8}), 0.25 * Matrix::Identity(2, 2),
                           levy::JumpComponent{0.8, levy::ExponentialAlong{vec({1.0, 1.0}), 2.5}});
}

// Point-mass jumps; finite MGF everywhere.
inline levy::LevyModel point_jumps() {
    levy::PointMasses pm;
    pm.atoms = {{vec({1.0, 0.2}), 0.5}, {vec({0.1, 0.9}), 0.3}, {vec({-0.3, -0.4}), 0.2}};
    return levy::LevyModel(vec({-0.9, -0.7}), 0.1 * Matrix::Identity(2, 2), levy::JumpComponent{0.7, pm});
}

// A random point strictly inside the MGF domain, kept away from the boundary.
inline Vector interior_point(const levy::LevyModel& m, std::mt19937_64& gen, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    for (;;) {
        Vector lam(m.dim());
        for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = u(gen);
        const auto dom = levy::in_domain(m, lam);
        if (dom.inside && dom.margin > 0.2) return lam;
    }
}

}  // namespace fixtures
