#pragma once

#include "levy/conditions.hpp"
#include "levy/model.hpp"
#include "levy/rates.hpp"
#include "levy/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace levy {

struct SimConfig {
    double delta = 0.05;     // skeleton step
    double horizon = 50.0;   // crude Monte Carlo truncation time
    std::int64_t n_paths = 100000;
    std::uint64_t master_seed = 1;
    std::int64_t chunk_size = 10000;
    // Importance-sampling paths that have not hit by this multiple of the expected
    // hitting time under the tilt are discarded with weight 0.
    double is_cap_factor = 100.0;
};

// Throws ConfigError when the configuration is inconsistent.
void validate(const SimConfig& cfg);

enum class Method { crude, importance };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

struct HitEstimate {
    double s = 0.0;
    Method method = Method::crude;
    double p_hat = 0.0;
    double std_err = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::int64_t n_paths = 0;
    std::int64_t n_hits = 0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    bool truncation_bias_flag = false;
    // Importance sampling only.
    double max_weight = 0.0;
    double weight_bound = 0.0;  // e^{-s D(G)}
    std::int64_t bound_violations = 0;
    std::int64_t n_discarded = 0;
};

// Per-chunk partial sums; reduced in chunk order.
struct ChunkStats {
    std::int64_t chunk = 0;
    std::int64_t n = 0;
    std::int64_t hits = 0;
    double hits_or_weightsum = 0.0;
    double weightsq_sum = 0.0;
    double max_weight = 0.0;
    std::int64_t bound_violations = 0;
};

struct RunOptions {
    int workers = 1;
    ToleranceProfile tol;
    // Run importance sampling even when the vertex conditions do not hold.
    bool override_conditions = false;
    std::vector<ChunkStats>* chunk_log = nullptr;
};

// Exact sampler of X(delta): Gaussian part by a square-root factor of the covariance,
// Poisson number of jumps, i.i.d. jumps. Not thread-safe (holds distribution state);
// construct one per worker.
class IncrementSampler {
public:
    explicit IncrementSampler(const LevyModel& model);

    Vector sample(double delta, Philox4x32& rng);

    // Advance x by one step of length delta, calling on_state(x) after every jump and
    // at the end of the step. Stops early and returns true when on_state returns true.
    template <class OnState>
    bool advance(Vector& x, double delta, Philox4x32& rng, OnState&& on_state);

private:
    void continuous(Vector& x, double h, Philox4x32& rng);
    void add_jump(Vector& x, Philox4x32& rng);

    Vector drift_;
    Matrix cov_root_;
    bool has_gaussian_ = false;
    double intensity_ = 0.0;
    JumpLaw law_;
    Matrix jump_cov_root_;
    std::discrete_distribution<int> atom_pick_;
    std::poisson_distribution<long> jump_count_;
    double count_delta_ = -1.0;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_;
    std::vector<double> jump_times_;
    Vector scratch_;
};

template <class OnState>
bool IncrementSampler::advance(Vector& x, double delta, Philox4x32& rng, OnState&& on_state) {
    if (intensity_ > 0.0) {
        if (delta != count_delta_) {
            jump_count_ = std::poisson_distribution<long>(intensity_ * delta);
            count_delta_ = delta;
        }
        const long n = jump_count_(rng);
        if (n > 0) {
            jump_times_.resize(static_cast<std::size_t>(n));
            for (auto& t : jump_times_) t = delta * uniform_(rng);
            std::sort(jump_times_.begin(), jump_times_.end());
            double now = 0.0;
            for (double t : jump_times_) {
                continuous(x, t - now, rng);
                add_jump(x, rng);
                now = t;
                if (on_state(x)) return true;
            }
            continuous(x, delta - now, rng);
            return on_state(x);
        }
    }
    continuous(x, delta, rng);
    return on_state(x);
}

Vector sample_increment(const LevyModel& model, double delta, Philox4x32& rng);

// Strict componentwise x > s g.
bool in_scaled_orthant(const Vector& x, const OrthantTarget& target, double s);

HitEstimate simulate_hitting_crude(const LevyModel& model, const OrthantTarget& target, double s,
                                   const SimConfig& cfg, const RunOptions& opts = {});

HitEstimate simulate_hitting_is(const LevyModel& model, const OrthantTarget& target, double s,
                                const SimConfig& cfg, const RunOptions& opts = {});

}  // namespace levy
