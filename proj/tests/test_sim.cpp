#include "fixtures.hpp"
#include "levy/errors.hpp"
#include "levy/sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace levy;
using fixtures::vec;

namespace {

double joint_se(const HitEstimate& a, const HitEstimate& b) { return std::hypot(a.std_err, b.std_err); }

bool overlap(const HitEstimate& a, const HitEstimate& b) { return a.ci_lo <= b.ci_hi && b.ci_lo <= a.ci_hi; }

}  // namespace

TEST_CASE("sample_increment") {
    Philox4x32 rng(1, 0);
    const auto drift_only = LevyModel::brownian(vec({1, 2}), Matrix::Zero(2, 2));
    for (int i = 0; i < 5; ++i) CHECK(sample_increment(drift_only, 0.5, rng) == vec({0.5, 1.0}));

    IncrementSampler bm(fixtures::bm());
    Vector sum = Vector::Zero(2);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += bm.sample(1.0, rng);
    CHECK(((sum / n) - vec({-1, -1})).cwiseAbs().maxCoeff() < 4.0 / 1000);

    // Var X(1) = Hess K(0); each entry compared within 5 standard errors.
    const auto cl = fixtures::jump_diffusion();
    IncrementSampler js(cl);
    const int m = 400000;
    std::vector<Vector> draws;
    draws.reserve(m);
    Vector mu = Vector::Zero(2);
    for (int i = 0; i < m; ++i) {
        draws.push_back(js.sample(1.0, rng));
        mu += draws.back();
    }
    mu /= m;
    const Matrix hess = cumulant_derivatives(cl, Vector::Zero(2)).hessian;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            double s1 = 0, s2 = 0;
            for (const auto& x : draws) {
                const double p = (x[a] - mu[a]) * (x[b] - mu[b]);
                s1 += p;
                s2 += p * p;
            }
            const double cov = s1 / m;
            const double se = std::sqrt((s2 / m - cov * cov) / m);
            CHECK(std::abs(cov - hess(a, b)) < 5 * se);
        }
    }
    CHECK_THROWS_AS(sample_increment(cl, 0.0, rng), DomainError);
}

TEST_CASE("crude: deterministic path") {
    const auto drift_only = LevyModel::brownian(vec({1, 1}), Matrix::Zero(2, 2));
    SimConfig cfg{0.1, 10.0, 50, 3, 16};
    const auto est = simulate_hitting_crude(drift_only, OrthantTarget(vec({1, 1})), 1.0, cfg);
    CHECK(est.p_hat == 1.0);
    CHECK(est.n_hits == 50);
    CHECK(est.truncation_bias_flag);
    CHECK(est.ci_lo <= est.p_hat);
    CHECK(est.ci_hi >= est.p_hat);
}

TEST_CASE("crude: classical ruin probability") {
    SimConfig cfg{1.0, 200.0, 100000, 11, 10000};
    const auto est = simulate_hitting_crude(fixtures::cl1(), OrthantTarget(vec({1})), 1.0, cfg);
    const double psi = 0.5 * std::exp(-1.0);
    CHECK(est.ci_lo <= psi);
    CHECK(psi <= est.ci_hi);
}

TEST_CASE("importance sampling: classical ruin probability") {
    SimConfig cfg{1.0, 200.0, 100000, 12, 10000};
    const auto est = simulate_hitting_is(fixtures::cl1(), OrthantTarget(vec({1})), 5.0, cfg);
    const double psi = 0.5 * std::exp(-5.0);
    CHECK(std::abs(est.p_hat - psi) / psi <= 0.02);
    CHECK(est.bound_violations == 0);
    CHECK(est.max_weight <= est.weight_bound);
    CHECK(est.weight_bound == doctest::Approx(std::exp(-5.0)).epsilon(1e-9));
    CHECK(est.n_discarded == 0);
    CHECK_FALSE(est.truncation_bias_flag);
}

TEST_CASE("crude and importance sampling agree on the Brownian fixture") {
    const auto bm = fixtures::bm();
    const OrthantTarget g(vec({1, 1}));
    SimConfig cfg{0.05, 10.0, 100000, 5, 5000};
    const auto crude = simulate_hitting_crude(bm, g, 1.0, cfg);
    const auto is = simulate_hitting_is(bm, g, 1.0, cfg);
    CHECK(overlap(crude, is));
    CHECK(is.bound_violations == 0);
    CHECK(is.max_weight <= std::exp(-4.0));
}

TEST_CASE("estimates do not depend on the worker count") {
    const auto m = fixtures::jump_diffusion();
    const OrthantTarget g(vec({1, 1}));
    SimConfig cfg{0.1, 10.0, 20000, 77, 1500};
    for (auto method : {Method::crude, Method::importance}) {
        RunOptions one, four;
        four.workers = 4;
        auto run = [&](const RunOptions& o) {
            return method == Method::crude ? simulate_hitting_crude(m, g, 1.5, cfg, o)
                                           : simulate_hitting_is(m, g, 1.5, cfg, o);
        };
        const auto a = run(one);
        const auto b = run(four);
        CHECK(a.p_hat == b.p_hat);
        CHECK(a.std_err == b.std_err);
        CHECK(a.n_hits == b.n_hits);
        CHECK(a.max_weight == b.max_weight);
    }
}

TEST_CASE("chunk log adds up to the estimate") {
    std::vector<ChunkStats> log;
    RunOptions opts;
    opts.chunk_log = &log;
    SimConfig cfg{1.0, 50.0, 2500, 9, 1000};
    const auto est = simulate_hitting_is(fixtures::cl1(), OrthantTarget(vec({1})), 2.0, cfg, opts);
    REQUIRE(log.size() == 3);
    CHECK(log[2].n == 500);
    double sum = 0;
    for (const auto& c : log) sum += c.hits_or_weightsum;
    CHECK(sum / 2500 == est.p_hat);
}

TEST_CASE("skeleton refinement can only find more hits") {
    const auto bm = fixtures::bm();
    const OrthantTarget g(vec({1, 1}));
    std::vector<HitEstimate> est;
    for (double delta : {0.2, 0.1, 0.05}) est.push_back(simulate_hitting_crude(bm, g, 1.0, {delta, 8.0, 40000, 21, 4000}));
    for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i].p_hat >= est[i - 1].p_hat - 2 * joint_se(est[i], est[i - 1]));
}

TEST_CASE("jump-epoch detection is exact when entry only happens at jumps") {
    const auto m = fixtures::gaussian_jumps();
    const OrthantTarget g(vec({1, 1}));
    const auto coarse = simulate_hitting_crude(m, g, 1.0, {1.0, 40.0, 40000, 31, 4000});
    const auto fine = simulate_hitting_crude(m, g, 1.0, {0.25, 40.0, 40000, 31, 4000});
    CHECK(std::abs(coarse.p_hat - fine.p_hat) < 2 * joint_se(coarse, fine));

    const auto is_coarse = simulate_hitting_is(m, g, 3.0, {1.0, 40.0, 40000, 32, 4000});
    const auto is_fine = simulate_hitting_is(m, g, 3.0, {0.25, 40.0, 40000, 32, 4000});
    CHECK(std::abs(is_coarse.p_hat - is_fine.p_hat) < 2 * joint_se(is_coarse, is_fine));
}

TEST_CASE("importance-sampling cap sensitivity") {
    const auto bm = fixtures::bm();
    const OrthantTarget g(vec({1, 1}));
    SimConfig wide{0.05, 10.0, 20000, 41, 2000};
    SimConfig tight = wide;
    tight.is_cap_factor = 5.0;
    const auto a = simulate_hitting_is(bm, g, 2.0, wide);
    const auto b = simulate_hitting_is(bm, g, 2.0, tight);
    CHECK(a.n_discarded == 0);
    CHECK(std::abs(a.p_hat - b.p_hat) < 2 * joint_se(a, b));
}

TEST_CASE("importance sampling is gated on the vertex condition") {
    const auto corr = fixtures::correlated_bm();
    const OrthantTarget g(vec({1, 4}));
    SimConfig cfg{0.1, 10.0, 200, 1, 100};
    CHECK_THROWS_AS(simulate_hitting_is(corr, g, 1.0, cfg), ConditionError);
    RunOptions forced;
    forced.override_conditions = true;
    const auto est = simulate_hitting_is(corr, g, 1.0, cfg, forced);
    CHECK(est.p_hat >= 0.0);
}

TEST_CASE("simulation config validation") {
    const auto bm = fixtures::bm();
    const OrthantTarget g(vec({1, 1}));
    CHECK_THROWS_AS(simulate_hitting_crude(bm, g, 1.0, {2.0, 1.0, 10, 1, 10}), ConfigError);
    CHECK_THROWS_AS(simulate_hitting_crude(bm, g, 1.0, {0.1, 1.0, 0, 1, 10}), ConfigError);
    CHECK_THROWS_AS(simulate_hitting_crude(bm, g, 1.0, {0.1, 1.0, 10, 1, 0}), ConfigError);
    CHECK_THROWS_AS(simulate_hitting_crude(bm, g, 0.0, {0.1, 1.0, 10, 1, 10}), ConfigError);
    CHECK_THROWS_AS(simulate_hitting_is(bm, OrthantTarget(vec({1})), 1.0, {0.1, 1.0, 10, 1, 10}), ConfigError);
}
