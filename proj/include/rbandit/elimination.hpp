#pragma once
/*
Fixed-budget best-arm identification with fresh reservoir arms.

Start with K_1 = floor(T/2) fresh arms. In round i every active arm is
sampled t_i = max(1, floor(c_eps T / (K_i i^(1+eps)))) times, with
c_eps = eps/8. The floor(K_i/2) v 1 arms with the highest round-local means
survive and floor(K_i/4) fresh arms join them, so

  K_{i+1} = (1 v floor(K_i/2)) + floor(K_i/4).

A round starts only while the pulls planned so far are at most T/2 and more
than one arm is active. Round-local means use only the t_i samples of the
current round.
*/

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rbandit/errors.hpp"
#include "rbandit/policy.hpp"

namespace rbandit {

struct EliminationConfig {
    double epsilon = 1.0;
    std::uint64_t horizon = 2;
    /// false gives the halving-only ablation: no arms are added between rounds.
    bool fresh_arms = true;
    /// K_1 = floor(c_bar T).
    double c_bar = 0.5;

    double c_bar_eps() const { return epsilon / 8.0; }
};

struct RoundPlan {
    std::uint64_t round = 1;
    std::uint64_t active = 0;
    std::uint64_t pulls_per_arm = 0;
    std::uint64_t fresh = 0;
    /// pulls_per_arm was cut down to keep total pulls within T.
    bool truncated = false;
};

inline std::uint64_t initial_set_size(std::uint64_t horizon, double c_bar = 0.5) {
    if (horizon < 2) fail(ErrorCode::BudgetTooSmall, "elimination needs T >= 2");
    if (!(c_bar > 0.0 && c_bar <= 0.5)) fail(ErrorCode::ParameterOutOfRange, "c_bar must be in (0, 1/2]");
    const auto k1 = static_cast<std::uint64_t>(std::floor(c_bar * static_cast<double>(horizon)));
    if (k1 < 1) fail(ErrorCode::BudgetTooSmall, "floor(c_bar T) is zero");
    return k1;
}

inline std::uint64_t survivors_count(std::uint64_t active) { return std::max<std::uint64_t>(1, active / 2); }

inline std::uint64_t next_set_size(std::uint64_t active, bool fresh_arms = true) {
    return survivors_count(active) + (fresh_arms ? active / 4 : 0);
}

inline std::uint64_t pulls_per_arm(std::uint64_t horizon, double epsilon, std::uint64_t active, std::uint64_t round) {
    const double raw = (epsilon / 8.0) * static_cast<double>(horizon) /
                       (static_cast<double>(active) * std::pow(static_cast<double>(round), 1.0 + epsilon));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(raw)));
}

/// The full round plan. Set sizes do not depend on rewards, so the schedule
/// is known in advance. The final round is truncated (or dropped) if it
/// would push total pulls past T.
inline std::vector<RoundPlan> round_schedule(std::uint64_t horizon, double epsilon, bool fresh_arms = true,
                                             double c_bar = 0.5) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrorCode::ParameterOutOfRange, "epsilon must be in (0,1]");
    std::vector<RoundPlan> plan;
    std::uint64_t active = initial_set_size(horizon, c_bar);
    std::uint64_t planned = 0;
    for (std::uint64_t i = 1; active > 1 && 2 * planned <= horizon; ++i) {
        RoundPlan r{i, active, pulls_per_arm(horizon, epsilon, active, i), fresh_arms ? active / 4 : 0, false};
        if (planned + r.active * r.pulls_per_arm > horizon) {
            r.pulls_per_arm = (horizon - planned) / r.active;
            r.truncated = true;
            if (r.pulls_per_arm == 0) break;
        }
        plan.push_back(r);
        planned += r.active * r.pulls_per_arm;
        active = next_set_size(active, fresh_arms);
    }
    return plan;
}

/// Top `keep` arms by round mean, ties to the lowest id. Returned in rank order.
inline std::vector<ArmId> select_survivors(std::span<const ArmId> ids, std::span<const double> means,
                                           std::size_t keep) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (means[a] != means[b]) return means[a] > means[b];
        return ids[a] < ids[b];
    });
    keep = std::min(keep, ids.size());
    std::vector<ArmId> out;
    out.reserve(keep);
    for (std::size_t j = 0; j < keep; ++j) out.push_back(ids[order[j]]);
    return out;
}

/// Recommendation from the final active set: the single arm if there is one,
/// otherwise the arm with the highest most recent round mean (ties to lowest
/// id). Arms without a round mean are skipped unless none has one.
inline std::optional<ArmId> recommend_from(std::span<const ArmId> final_set,
                                           std::span<const std::optional<double>> last_means) {
    if (final_set.empty()) return std::nullopt;
    if (final_set.size() == 1) return final_set.front();
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < final_set.size(); ++j) {
        if (!last_means[j]) continue;
        if (!best || *last_means[j] > *last_means[*best] ||
            (*last_means[j] == *last_means[*best] && final_set[j] < final_set[*best]))
            best = j;
    }
    if (best) return final_set[*best];
    return *std::min_element(final_set.begin(), final_set.end());
}

struct RoundRecord {
    RoundPlan plan;
    std::vector<ArmId> active;
    std::vector<double> round_means;
    std::vector<ArmId> survivors;
    std::vector<ArmId> added;
};

class FreshArmElimination : public ClonablePolicy<FreshArmElimination> {
public:
    explicit FreshArmElimination(const EliminationConfig& cfg)
        : cfg_(cfg), schedule_(round_schedule(cfg.horizon, cfg.epsilon, cfg.fresh_arms, cfg.c_bar)),
          to_draw_(initial_set_size(cfg.horizon, cfg.c_bar)) {}

    Action next() override {
        for (;;) {
            if (to_draw_ > 0) return DrawFresh{};
            if (round_ >= schedule_.size()) return Halt{};
            const RoundPlan& plan = schedule_[round_];
            if (arm_pos_ < active_.size()) {
                if (pulls_this_arm_ < plan.pulls_per_arm) return PullExisting{active_[arm_pos_]};
                ++arm_pos_;
                pulls_this_arm_ = 0;
                continue;
            }
            close_round();
        }
    }

    void on_drawn(ArmId arm_id) override {
        --to_draw_;
        active_.push_back(arm_id);
        last_means_.emplace_back(std::nullopt);
        round_sums_.push_back(0.0);
        if (!trace_.empty() && round_ > 0) trace_.back().added.push_back(arm_id);
    }

    void on_reward(ArmId, double reward) override {
        round_sums_[arm_pos_] += reward;
        ++pulls_this_arm_;
    }

    bool makes_recommendation() const override { return true; }
    std::optional<ArmId> recommend() const override { return recommend_from(active_, last_means_); }

    std::string name() const override { return cfg_.fresh_arms ? "elimination" : "halving"; }
    nlohmann::json config() const override {
        return {{"epsilon", cfg_.epsilon}, {"T", cfg_.horizon}, {"fresh_arms", cfg_.fresh_arms}, {"c_bar", cfg_.c_bar}};
    }

    const std::vector<RoundPlan>& schedule() const { return schedule_; }
    const std::vector<RoundRecord>& rounds() const { return trace_; }
    const std::vector<ArmId>& active_set() const { return active_; }

private:
    void close_round() {
        const RoundPlan& plan = schedule_[round_];
        std::vector<double> means(active_.size());
        for (std::size_t j = 0; j < active_.size(); ++j)
            means[j] = round_sums_[j] / static_cast<double>(plan.pulls_per_arm);

        RoundRecord rec{plan, active_, means, select_survivors(active_, means, survivors_count(active_.size())), {}};

        std::vector<std::optional<double>> survivor_means;
        for (ArmId id : rec.survivors) {
            const auto pos = static_cast<std::size_t>(std::find(active_.begin(), active_.end(), id) - active_.begin());
            survivor_means.emplace_back(means[pos]);
        }
        active_ = rec.survivors;
        last_means_ = std::move(survivor_means);
        round_sums_.assign(active_.size(), 0.0);
        trace_.push_back(std::move(rec));

        to_draw_ = plan.fresh;
        ++round_;
        arm_pos_ = 0;
        pulls_this_arm_ = 0;
    }

    EliminationConfig cfg_;
    std::vector<RoundPlan> schedule_;
    std::uint64_t to_draw_;
    std::size_t round_ = 0;
    std::vector<ArmId> active_;
    std::vector<std::optional<double>> last_means_;
    std::vector<double> round_sums_;
    std::size_t arm_pos_ = 0;
    std::uint64_t pulls_this_arm_ = 0;
    std::vector<RoundRecord> trace_;
};

inline FreshArmElimination baseline_halving_no_fresh(std::uint64_t horizon, double epsilon) {
    return FreshArmElimination(EliminationConfig{epsilon, horizon, false, 0.5});
}

/// Draw m arms, pull each floor(T/m) times, recommend the best empirical mean.
class UniformCommit : public ClonablePolicy<UniformCommit> {
public:
    UniformCommit(std::uint64_t arms, std::uint64_t horizon)
        : m_(arms), horizon_(horizon), per_arm_(arms ? horizon / arms : 0) {
        if (m_ < 1 || m_ > horizon_) fail(ErrorCode::ParameterOutOfRange, "uniform commit needs 1 <= m <= T");
    }

    Action next() override {
        if (arms_.size() < m_) return DrawFresh{};
        while (pos_ < m_ && arms_[pos_].pulls >= per_arm_) ++pos_;
        if (pos_ >= m_) return Halt{};
        return PullExisting{arms_[pos_].arm_id};
    }

    void on_drawn(ArmId arm_id) override { arms_.push_back(ArmStats{arm_id, 0, 0.0}); }
    void on_reward(ArmId, double reward) override { arms_[pos_].record(reward); }

    bool makes_recommendation() const override { return true; }
    std::optional<ArmId> recommend() const override {
        if (arms_.empty()) return std::nullopt;
        std::vector<ArmId> ids;
        std::vector<double> means;
        for (const auto& a : arms_) {
            ids.push_back(a.arm_id);
            means.push_back(a.pulls ? a.empirical_mean() : 0.0);
        }
        return select_survivors(ids, means, 1).front();
    }

    std::string name() const override { return "uniform_commit"; }
    nlohmann::json config() const override { return {{"m", m_}, {"T", horizon_}}; }

private:
    std::uint64_t m_;
    std::uint64_t horizon_;
    std::uint64_t per_arm_;
    std::vector<ArmStats> arms_;
    std::size_t pos_ = 0;
};

} // namespace rbandit
