#include "levy/sim.hpp"

#include "levy/errors.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace levy {
namespace {

constexpr double kZ95 = 1.959963984540054;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix square_root_factor(const Matrix& cov) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

// Runs fn(chunk_index, paths_in_chunk) for every chunk on `workers` threads and
// returns the per-chunk results in chunk order.
std::vector<ChunkStats> run_chunks(const SimConfig& cfg, int workers,
                                   const std::function<ChunkStats(std::int64_t, std::int64_t)>& fn) {
    const std::int64_t n_chunks = (cfg.n_paths + cfg.chunk_size - 1) / cfg.chunk_size;
    std::vector<ChunkStats> out(static_cast<std::size_t>(n_chunks));
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (std::int64_t c = next++; c < n_chunks; c = next++) {
            const std::int64_t n = std::min(cfg.chunk_size, cfg.n_paths - c * cfg.chunk_size);
            out[static_cast<std::size_t>(c)] = fn(c, n);
            out[static_cast<std::size_t>(c)].chunk = c;
            out[static_cast<std::size_t>(c)].n = n;
        }
    };
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n_chunks)));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

void check_common(const LevyModel& model, const OrthantTarget& target, double s, const SimConfig& cfg) {
    validate(cfg);
    if (!(s > 0.0)) throw ConfigError("s must be positive");
    if (target.dim() != model.dim()) throw ConfigError("target.g dimension does not match the model");
}

}  // namespace

void validate(const SimConfig& cfg) {
    if (!(cfg.delta > 0.0)) throw ConfigError("sim.delta must be positive");
    if (!(cfg.horizon > 0.0)) throw ConfigError("sim.horizon must be positive");
    if (cfg.delta > cfg.horizon) throw ConfigError("sim.delta must not exceed sim.horizon");
    if (cfg.n_paths < 1) throw ConfigError("sim.n_paths must be at least 1");
    if (cfg.chunk_size < 1) throw ConfigError("sim.chunk_size must be at least 1");
    if (!(cfg.is_cap_factor > 0.0)) throw ConfigError("sim.is_cap_factor must be positive");
}

const char* to_string(Method m) { return m == Method::crude ? "crude" : "importance"; }

Method method_from_string(const std::string& name) {
    if (name == "crude") return Method::crude;
    if (name == "importance") return Method::importance;
    throw ConfigError("unknown method '" + name + "' (expected crude or importance)");
}

IncrementSampler::IncrementSampler(const LevyModel& model)
    : drift_(model.drift()), scratch_(Vector::Zero(model.dim())) {
    has_gaussian_ = model.cov().cwiseAbs().maxCoeff() > 0.0;
    if (has_gaussian_) cov_root_ = square_root_factor(model.cov());
    if (const auto& j = model.jumps()) {
        intensity_ = j->intensity;
        law_ = j->law;
        if (const auto* g = std::get_if<GaussianJump>(&law_)) jump_cov_root_ = square_root_factor(g->cov);
        if (const auto* p = std::get_if<PointMasses>(&law_)) {
            std::vector<double> w;
            for (const auto& a : p->atoms) w.push_back(a.prob);
            atom_pick_ = std::discrete_distribution<int>(w.begin(), w.end());
        }
    }
}

void IncrementSampler::continuous(Vector& x, double h, Philox4x32& rng) {
    x += h * drift_;
    if (!has_gaussian_ || h <= 0.0) return;
    for (Eigen::Index i = 0; i < scratch_.size(); ++i) scratch_[i] = normal_(rng);
    x.noalias() += std::sqrt(h) * (cov_root_ * scratch_);
}

void IncrementSampler::add_jump(Vector& x, Philox4x32& rng) {
    std::visit(Overloaded{
                   [&](const ExponentialAlong& e) {
                       std::exponential_distribution<double> size(e.rate);
                       x += size(rng) * e.direction;
                   },
                   [&](const GaussianJump& g) {
                       for (Eigen::Index i = 0; i < scratch_.size(); ++i) scratch_[i] = normal_(rng);
                       x += g.mean;
                       x.noalias() += jump_cov_root_ * scratch_;
                   },
                   [&](const PointMasses& p) { x += p.atoms[static_cast<std::size_t>(atom_pick_(rng))].point; },
               },
               law_);
}

Vector IncrementSampler::sample(double delta, Philox4x32& rng) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    Vector x = Vector::Zero(drift_.size());
    advance(x, delta, rng, [](const Vector&) { return false; });
    return x;
}

Vector sample_increment(const LevyModel& model, double delta, Philox4x32& rng) {
    IncrementSampler sampler(model);
    return sampler.sample(delta, rng);
}

bool in_scaled_orthant(const Vector& x, const OrthantTarget& target, double s) {
    const Vector& g = target.vertex();
    for (Eigen::Index j = 0; j < g.size(); ++j)
        if (!(x[j] > s * g[j])) return false;
    return true;
}

HitEstimate simulate_hitting_crude(const LevyModel& model, const OrthantTarget& target, double s,
                                   const SimConfig& cfg, const RunOptions& opts) {
    check_common(model, target, s, cfg);
    const auto steps = static_cast<std::int64_t>(std::floor(cfg.horizon / cfg.delta + 1e-9));

    auto chunk = [&](std::int64_t c, std::int64_t n) {
        Philox4x32 rng(cfg.master_seed, static_cast<std::uint64_t>(c));
        IncrementSampler sampler(model);
        Vector x(model.dim());
        ChunkStats st;
        auto hit = [&](const Vector& state) { return in_scaled_orthant(state, target, s); };
        for (std::int64_t p = 0; p < n; ++p) {
            x.setZero();
            for (std::int64_t k = 0; k < steps; ++k) {
                if (sampler.advance(x, cfg.delta, rng, hit)) {
                    ++st.hits;
                    break;
                }
            }
        }
        st.hits_or_weightsum = static_cast<double>(st.hits);
        st.weightsq_sum = static_cast<double>(st.hits);
        st.max_weight = st.hits > 0 ? 1.0 : 0.0;
        return st;
    };
    const auto chunks = run_chunks(cfg, opts.workers, chunk);
    if (opts.chunk_log) *opts.chunk_log = chunks;

    HitEstimate est;
    est.s = s;
    est.method = Method::crude;
    est.n_paths = cfg.n_paths;
    est.delta = cfg.delta;
    est.seed = cfg.master_seed;
    est.truncation_bias_flag = true;
    for (const auto& st : chunks) est.n_hits += st.hits;
    const double n = static_cast<double>(est.n_paths);
    const double p = static_cast<double>(est.n_hits) / n;
    est.p_hat = p;
    est.std_err = std::sqrt(p * (1.0 - p) / n);
    // Wilson score interval; contains p_hat and stays inside [0, 1].
    const double z2 = kZ95 * kZ95;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    est.ci_lo = std::clamp(std::min(centre - half, p), 0.0, 1.0);
    est.ci_hi = std::clamp(std::max(centre + half, p), 0.0, 1.0);
    est.max_weight = est.n_hits > 0 ? 1.0 : 0.0;
    est.weight_bound = 1.0;
    return est;
}

HitEstimate simulate_hitting_is(const LevyModel& model, const OrthantTarget& target, double s,
                                const SimConfig& cfg, const RunOptions& opts) {
    check_common(model, target, s, cfg);

    Vector tilt;
    double r_g = 0.0;
    const auto report = check_conditions(model, target, opts.tol);
    if (report.c3.overall == Verdict::holds) {
        tilt = *report.normal;
        r_g = *report.r_g;
    } else if (opts.override_conditions) {
        const auto sr = second_rate(model, target.vertex(), opts.tol);
        tilt = sr.tilt;
        r_g = 1.0 / sr.u_star;
    } else {
        throw ConditionError(std::string("importance sampling needs the vertex condition to hold: c3 is ") +
                             to_string(report.c3.overall) + " (" + report.c3.reason + ")");
    }
    const LevyModel tilted = tilt_model(model, tilt);
    const Vector& g = target.vertex();

    // Under the tilt X drifts with mean grad K(tilt) = r_G g and reaches s g around t = s / r_G.
    const double cap_time = cfg.is_cap_factor * s / r_g;
    const auto cap_steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cap_time / cfg.delta)));

    // Same evaluation order as the weights below, so hits can never exceed the bound by rounding.
    double bound_exponent = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) bound_exponent += tilt[j] * (s * g[j]);
    const double bound = std::exp(-bound_exponent);

    auto chunk = [&](std::int64_t c, std::int64_t n) {
        Philox4x32 rng(cfg.master_seed, static_cast<std::uint64_t>(c));
        IncrementSampler sampler(tilted);
        Vector x(model.dim());
        ChunkStats st;
        auto hit = [&](const Vector& state) { return in_scaled_orthant(state, target, s); };
        for (std::int64_t p = 0; p < n; ++p) {
            x.setZero();
            for (std::int64_t k = 0; k < cap_steps; ++k) {
                if (sampler.advance(x, cfg.delta, rng, hit)) {
                    double e = 0.0;
                    for (Eigen::Index j = 0; j < x.size(); ++j) e += tilt[j] * x[j];
                    const double w = std::exp(-e);
                    ++st.hits;
                    st.hits_or_weightsum += w;
                    st.weightsq_sum += w * w;
                    st.max_weight = std::max(st.max_weight, w);
                    if (w > bound) ++st.bound_violations;
                    break;
                }
            }
        }
        return st;
    };
    const auto chunks = run_chunks(cfg, opts.workers, chunk);
    if (opts.chunk_log) *opts.chunk_log = chunks;

    HitEstimate est;
    est.s = s;
    est.method = Method::importance;
    est.n_paths = cfg.n_paths;
    est.delta = cfg.delta;
    est.seed = cfg.master_seed;
    est.weight_bound = bound;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& st : chunks) {
        est.n_hits += st.hits;
        sum += st.hits_or_weightsum;
        sumsq += st.weightsq_sum;
        est.max_weight = std::max(est.max_weight, st.max_weight);
        est.bound_violations += st.bound_violations;
    }
    est.n_discarded = est.n_paths - est.n_hits;
    const double n = static_cast<double>(est.n_paths);
    est.p_hat = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sumsq - n * est.p_hat * est.p_hat) / (n - 1.0)) : 0.0;
    est.std_err = std::sqrt(var / n);
    est.ci_lo = std::max(0.0, est.p_hat - kZ95 * est.std_err);
    est.ci_hi = std::min(1.0, est.p_hat + kZ95 * est.std_err);
    return est;
}

}  // namespace levy
