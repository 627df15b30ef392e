#include "fixtures.hpp"
#include "levy/errors.hpp"
#include "levy/model.hpp"
#include "levy/rng.hpp"
#include "levy/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace levy;
using fixtures::vec;

namespace {

std::vector<LevyModel> all_fixtures() {
    return {fixtures::bm(), fixtures::correlated_bm(), fixtures::cl2_parallel(), fixtures::cl1(),
            fixtures::gaussian_jumps(), fixtures::jump_diffusion(), fixtures::point_jumps()};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("cumulant closed forms") {
    CHECK(cumulant(fixtures::bm(), vec({1, 1})) == doctest::Approx(-1.0).epsilon(1e-15));
    // K = lambda_P (beta / (beta - <c,lam>) - 1) - <p, lam> = 3/1.5 - 1 - 1.5
    CHECK(cumulant(fixtures::cl2_parallel(), vec({1, 0.5})) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(cumulant(fixtures::cl2_parallel(), vec({2, 1})) == std::numeric_limits<double>::infinity());
    CHECK(cumulant(fixtures::cl2_parallel(), vec({3, 1})) == std::numeric_limits<double>::infinity());
}

TEST_CASE("cumulant agrees with a Monte Carlo log-moment of X(1)") {
    const auto m = fixtures::cl2_parallel();
    const Vector lam = vec({0.5, 0.25});
    Philox4x32 rng(7, 0);
    IncrementSampler sampler(m);
    const int n = 200000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        const double e = std::exp(lam.dot(sampler.sample(1.0, rng)));
        sum += e;
        sumsq += e * e;
    }
    const double mgf = sum / n;
    const double se = std::sqrt((sumsq / n - mgf * mgf) / n);
    CHECK(std::abs(mgf - std::exp(cumulant(m, lam))) < 5 * se);
}

TEST_CASE("cumulant derivatives") {
    const auto bm = cumulant_derivatives(fixtures::bm(), vec({2, 2}));
    CHECK(bm.gradient.isApprox(vec({1, 1}), 1e-15));
    CHECK(bm.hessian.isApprox(Matrix::Identity(2, 2), 1e-15));

    // lambda_P beta / (beta - t)^2 - p = 2 / 1 - 1
    CHECK(cumulant_derivatives(fixtures::cl1(), vec({1})).gradient[0] == doctest::Approx(1.0).epsilon(1e-15));

    for (const auto& m : all_fixtures())
        CHECK((cumulant_derivatives(m, Vector::Zero(m.dim())).gradient - mean(m)).norm() < 1e-15);

    CHECK_THROWS_AS(cumulant_derivatives(fixtures::cl1(), vec({2})), DomainError);
    CHECK_THROWS_AS(cumulant_derivatives(fixtures::cl1(), vec({2.5})), DomainError);
}

TEST_CASE("mean") {
    CHECK(mean(fixtures::bm()).isApprox(vec({-1, -1})));
    CHECK(mean(fixtures::cl2_parallel()).isApprox(vec({-2.0 / 3, -2.0 / 3}), 1e-15));
    CHECK(mean(fixtures::cl1())[0] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("in_domain margins") {
    const auto bm = in_domain(fixtures::bm(), vec({100, -40}));
    CHECK(bm.inside);
    CHECK(bm.margin == std::numeric_limits<double>::infinity());

    const auto inside = in_domain(fixtures::cl2_parallel(), vec({1, 1}));
    CHECK(inside.inside);
    CHECK(inside.margin == doctest::Approx(1.0));
    CHECK_FALSE(in_domain(fixtures::cl2_parallel(), vec({2, 2})).inside);
    CHECK_FALSE(in_domain(fixtures::cl2_parallel(), vec({1.5, 1.5})).inside);
}

TEST_CASE("scale_time") {
    const auto bm = fixtures::bm();
    const auto same = scale_time(bm, 1.0);
    CHECK(same.drift() == bm.drift());
    CHECK(same.cov() == bm.cov());

    const auto quarter = scale_time(bm, 0.25);
    CHECK(quarter.drift().isApprox(vec({-0.25, -0.25})));
    CHECK(quarter.cov().isApprox(0.25 * Matrix::Identity(2, 2)));

    CHECK_THROWS_AS(scale_time(bm, 0.0), DomainError);
    CHECK_THROWS_AS(scale_time(bm, -1.0), DomainError);

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> delta(0.05, 4.0);
    for (const auto& m : all_fixtures()) {
        for (int i = 0; i < 20; ++i) {
            const double a = delta(gen), b = delta(gen);
            const Vector lam = fixtures::interior_point(m, gen);
            const double k = cumulant(m, lam);
            CHECK(rel_err(cumulant(scale_time(m, a), lam), a * k) < 1e-12);
            // Semigroup: scaling by a then b is scaling by ab.
            CHECK(rel_err(cumulant(scale_time(scale_time(m, a), b), lam), cumulant(scale_time(m, a * b), lam)) <
                  1e-12);
        }
    }
}

TEST_CASE("model construction rejects invalid parameters") {
    CHECK_THROWS_AS(LevyModel(vec({-1, -1}), Matrix::Identity(3, 3)), DomainError);
    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;  // eigenvalue -1
    CHECK_THROWS_AS(LevyModel(vec({-1, -1}), bad), DomainError);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0.1, 1;
    CHECK_THROWS_AS(LevyModel(vec({-1, -1}), asym), DomainError);
    CHECK_THROWS_AS(LevyModel(vec({-1}), Matrix::Zero(1, 1), JumpComponent{0.0, ExponentialAlong{vec({1}), 1.0}}),
                    DomainError);
    CHECK_THROWS_AS(LevyModel(vec({-1}), Matrix::Zero(1, 1), JumpComponent{1.0, ExponentialAlong{vec({0}), 1.0}}),
                    DomainError);
    CHECK_THROWS_AS(LevyModel(vec({-1}), Matrix::Zero(1, 1), JumpComponent{1.0, ExponentialAlong{vec({1}), -1.0}}),
                    DomainError);
    PointMasses pm;
    pm.atoms = {{vec({1}), 0.5}, {vec({2}), 0.4}};
    CHECK_THROWS_AS(LevyModel(vec({-1}), Matrix::Zero(1, 1), JumpComponent{1.0, pm}), DomainError);

    // Eigenvalues just below zero are clamped, not rejected.
    Matrix nearly(2, 2);
    nearly << 1, 1, 1, 1 - 1e-12;
    const LevyModel ok(vec({-1, -1}), nearly);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ok.cov());
    CHECK(eig.eigenvalues().minCoeff() >= -1e-15);
}

TEST_CASE("cumulant invariants over fixtures") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& m : all_fixtures()) {
        CHECK(std::abs(cumulant(m, Vector::Zero(m.dim()))) <= 1e-14);

        for (int i = 0; i < 100; ++i) {
            const Vector lam = fixtures::interior_point(m, gen);
            const auto der = cumulant_derivatives(m, lam);
            // Central differences of K against the analytic gradient and Hessian.
            for (int j = 0; j < m.dim(); ++j) {
                const double h = 1e-5;
                Vector e = Vector::Zero(m.dim());
                e[j] = h;
                const double fd = (cumulant(m, lam + e) - cumulant(m, lam - e)) / (2 * h);
                CHECK(std::abs(fd - der.gradient[j]) <= 1e-6 * std::max(1.0, std::abs(der.gradient[j])));
                const Vector fd_row = (cumulant_derivatives(m, lam + e).gradient -
                                       cumulant_derivatives(m, lam - e).gradient) / (2 * h);
                CHECK((fd_row - der.hessian.col(j)).norm() <= 1e-6 * std::max(1.0, der.hessian.norm()));
            }
            CHECK((der.hessian - der.hessian.transpose()).norm() <= 1e-14 * std::max(1.0, der.hessian.norm()));

            // Convexity along a random chord.
            const Vector other = fixtures::interior_point(m, gen);
            const double t = unit(gen);
            CHECK(cumulant(m, t * lam + (1 - t) * other) <= t * cumulant(m, lam) + (1 - t) * cumulant(m, other) + 1e-10);
        }
    }
}

TEST_CASE("tilt_model") {
    const auto bm = fixtures::bm();
    const auto same = tilt_model(bm, Vector::Zero(2));
    CHECK(same.drift() == bm.drift());

    CHECK(tilt_model(bm, vec({2, 2})).drift().isApprox(vec({1, 1})));

    const auto cl = tilt_model(fixtures::cl1(), vec({1}));
    REQUIRE(cl.jumps());
    CHECK(cl.jumps()->intensity == doctest::Approx(2.0));
    CHECK(std::get<ExponentialAlong>(cl.jumps()->law).rate == doctest::Approx(1.0));
    CHECK(cl.drift()[0] == doctest::Approx(-1.0));
    CHECK(mean(cl)[0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(tilt_model(fixtures::cl1(), vec({2})), DomainError);

    // The tilted cumulant is K(lam + tilt) - K(tilt) for every family.
    std::mt19937_64 gen(5);
    for (const auto& m : all_fixtures()) {
        for (int i = 0; i < 10; ++i) {
            const Vector tilt = fixtures::interior_point(m, gen, 0.5);
            const auto tm = tilt_model(m, tilt);
            const Vector lam = fixtures::interior_point(tm, gen, 0.3);
            if (!in_domain(m, lam + tilt).inside) continue;
            CHECK(rel_err(cumulant(tm, lam), cumulant(m, lam + tilt) - cumulant(m, tilt)) < 1e-12);
            CHECK((mean(tm) - cumulant_derivatives(m, tilt).gradient).norm() < 1e-12);
        }
    }
}
