#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "rbandit/errors.hpp"
#include "rbandit/policy.hpp"
#include "rbandit/random.hpp"
#include "rbandit/reservoir.hpp"
#include "rbandit/stats.hpp"

namespace rbandit {

/// Engine-side record of a drawn arm. Unlike ArmStats it knows the type.
struct ArmState {
    ArmInstance arm;
    std::uint64_t pulls = 0;
    double reward_sum = 0.0;

    double empirical_mean() const {
        return pulls == 0 ? std::numeric_limits<double>::quiet_NaN() : reward_sum / static_cast<double>(pulls);
    }
};

struct RunResult {
    double total_pseudo_regret = 0.0;
    std::uint64_t pulls_used = 0;
    std::uint64_t fresh_draws = 0;
    std::optional<ArmId> recommended_arm;
    std::optional<std::size_t> recommended_type;
    std::optional<double> recommended_mean;
    std::optional<bool> is_error;
    std::vector<double> regret_curve;
    std::uint64_t seed = 0;
    /// Timing only; excluded from every determinism comparison.
    double wall_time_ms = 0.0;
};

/// Equality of everything except wall time.
inline bool same_outcome(const RunResult& a, const RunResult& b) {
    return a.total_pseudo_regret == b.total_pseudo_regret && a.pulls_used == b.pulls_used &&
           a.fresh_draws == b.fresh_draws && a.recommended_arm == b.recommended_arm &&
           a.recommended_type == b.recommended_type && a.recommended_mean == b.recommended_mean &&
           a.is_error == b.is_error && a.regret_curve == b.regret_curve && a.seed == b.seed;
}

struct EpisodeOptions {
    bool record_curve = false;
    /// Fresh draws beyond this count are rejected as InvalidAction. 0 selects 4T + 64.
    std::uint64_t max_fresh_draws = 0;
};

/// Read-only view of an episode after it finished; useful for inspecting arm states in tests.
struct EpisodeTrace {
    std::vector<ArmState> arms;
    std::vector<ArmId> pull_sequence;
};

/// Plays one episode of `policy` on `reservoir` with at most `horizon` pulls.
///
/// Regret is pseudo-regret: each pull adds mu* minus the mean of the pulled
/// arm's type, independent of the realised reward. The episode ends when the
/// policy halts; a pull requested after the budget is spent raises
/// PolicyOverBudget.
inline RunResult run_episode(const Reservoir& reservoir, Policy& policy, std::uint64_t horizon, std::uint64_t seed,
                             const EpisodeOptions& options = {}, EpisodeTrace* trace = nullptr) {
    if (horizon < 1) fail(ErrorCode::ParameterOutOfRange, "horizon must be at least 1");
    const std::uint64_t draw_limit = options.max_fresh_draws ? options.max_fresh_draws : 4 * horizon + 64;

    CounterStream rng(seed);
    ArmSampler sampler(reservoir);
    std::vector<ArmState> arms;
    RunResult result;
    result.seed = seed;
    if (options.record_curve) result.regret_curve.reserve(horizon);

    for (;;) {
        const Action action = policy.next();
        if (std::holds_alternative<Halt>(action)) break;

        if (std::holds_alternative<DrawFresh>(action)) {
            if (arms.size() >= draw_limit)
                fail(ErrorCode::InvalidAction, "fresh-draw limit of " + std::to_string(draw_limit) + " exceeded");
            const ArmInstance arm = sampler.sample_arm(rng);
            arms.push_back(ArmState{arm, 0, 0.0});
            policy.on_drawn(arm.arm_id);
            continue;
        }

        const ArmId id = std::get<PullExisting>(action).arm_id;
        if (id >= arms.size()) fail(ErrorCode::InvalidAction, "pull of undrawn arm " + std::to_string(id));
        if (result.pulls_used >= horizon)
            fail(ErrorCode::PolicyOverBudget, "pull requested after " + std::to_string(horizon) + " pulls");

        ArmState& st = arms[id];
        const double reward = sampler.draw_reward(st.arm, rng);
        st.pulls += 1;
        st.reward_sum += reward;
        result.pulls_used += 1;
        result.total_pseudo_regret += reservoir.mu_star() - reservoir.type(st.arm.type_index).mean;
        if (options.record_curve) result.regret_curve.push_back(result.total_pseudo_regret);
        if (trace) trace->pull_sequence.push_back(id);
        policy.on_reward(id, reward);
    }

    result.fresh_draws = arms.size();
    if (policy.makes_recommendation()) {
        result.recommended_arm = policy.recommend();
        if (result.recommended_arm) {
            if (*result.recommended_arm >= arms.size())
                fail(ErrorCode::InvalidAction, "recommended arm was never drawn");
            result.recommended_type = arms[*result.recommended_arm].arm.type_index;
            result.recommended_mean = reservoir.type(*result.recommended_type).mean;
            result.is_error = *result.recommended_mean != reservoir.mu_star();
        } else {
            // No recommendation counts as an error.
            result.is_error = true;
        }
    }
    if (trace) trace->arms = std::move(arms);
    return result;
}

struct AggregateStats {
    std::size_t n_trials = 0;
    double mean_regret = 0.0;
    double std_regret = 0.0;
    double se_regret = 0.0;
    double min_regret = 0.0;
    double max_regret = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double mean_pulls = 0.0;
    /// Trials that carried a recommendation verdict; zero for pure regret policies.
    std::size_t judged_trials = 0;
    std::size_t errors = 0;
    std::optional<double> error_rate;
    stats::Interval error_wilson95;
};

inline AggregateStats aggregate(const std::vector<RunResult>& runs) {
    AggregateStats s;
    s.n_trials = runs.size();
    if (runs.empty()) return s;
    std::vector<double> regrets;
    regrets.reserve(runs.size());
    double pulls = 0.0;
    for (const auto& r : runs) {
        regrets.push_back(r.total_pseudo_regret);
        pulls += static_cast<double>(r.pulls_used);
        if (r.is_error) {
            ++s.judged_trials;
            s.errors += *r.is_error ? 1 : 0;
        }
    }
    s.mean_regret = stats::mean(regrets);
    s.std_regret = stats::stddev(regrets);
    s.se_regret = stats::standard_error(regrets);
    s.mean_pulls = pulls / static_cast<double>(runs.size());
    std::sort(regrets.begin(), regrets.end());
    s.min_regret = regrets.front();
    s.max_regret = regrets.back();
    s.q10 = stats::quantile_sorted(regrets, 0.1);
    s.q50 = stats::quantile_sorted(regrets, 0.5);
    s.q90 = stats::quantile_sorted(regrets, 0.9);
    if (s.judged_trials > 0) {
        s.error_rate = static_cast<double>(s.errors) / static_cast<double>(s.judged_trials);
        s.error_wilson95 = stats::wilson(s.errors, s.judged_trials);
    }
    return s;
}

struct TrialsResult {
    AggregateStats stats;
    std::vector<RunResult> runs;
};

/// Runs `n_trials` independent episodes. Trial i is seeded with
/// derive_trial_seed(master_seed, i), so per-trial results do not depend on
/// `parallelism`. The first failing trial (lowest index) is rethrown as a
/// TrialError.
inline TrialsResult run_trials(const Reservoir& reservoir, const PolicyFactory& factory, std::uint64_t horizon,
                               std::size_t n_trials, std::uint64_t master_seed, unsigned parallelism = 1,
                               const EpisodeOptions& options = {}) {
    if (n_trials < 1) fail(ErrorCode::ParameterOutOfRange, "n_trials must be at least 1");
    TrialsResult out;
    out.runs.resize(n_trials);

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::optional<std::size_t> failed_index;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_trials) return;
            try {
                auto policy = factory();
                const auto start = std::chrono::steady_clock::now();
                RunResult r = run_episode(reservoir, *policy, horizon, derive_trial_seed(master_seed, i), options);
                r.wall_time_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                out.runs[i] = std::move(r);
            } catch (const Error& e) {
                std::lock_guard lock(err_mu);
                if (!failed_index || i < *failed_index) {
                    failed_index = i;
                    failure = std::make_exception_ptr(TrialError(e, i));
                }
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!failed_index || i < *failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(n_trials)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    out.stats = aggregate(out.runs);
    return out;
}

} // namespace rbandit
