#pragma once
/*
Sampling UCB for cumulative regret on a reservoir.

Draw L arms up front, pull each once in draw order, then for every remaining
round play the arm with the largest index

  U_a = mu_hat_a + sqrt( (gamma^2 / (4 (1 - gamma)) + ln(pi^2 / 6) + 2 ln N_a) / (2 N_a) ).

The bonus does not depend on the horizon: confidence bounds are exceeded with
a constant probability rather than 1/T. The horizon enters only through

  L = ceil( 4 ln(T) / (p* gamma^2) ),

which guarantees that, with probability about 1 - 1/T, a fraction at least
(1 - gamma) p* of the sampled arms is optimal.

The same machinery with the textbook index mu_hat + sqrt(2 ln(T) / N) is
exposed as a classical-UCB baseline.
*/

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rbandit/errors.hpp"
#include "rbandit/policy.hpp"

namespace rbandit {

inline std::uint64_t default_L(std::uint64_t horizon, double p_star, double gamma) {
    if (horizon < 2) fail(ErrorCode::ParameterOutOfRange, "default_L needs T >= 2");
    if (!(p_star > 0.0 && p_star <= 1.0)) fail(ErrorCode::ParameterOutOfRange, "p_star must be in (0,1]");
    if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::ParameterOutOfRange, "gamma must be in (0,1)");
    return static_cast<std::uint64_t>(
        std::ceil(4.0 * std::log(static_cast<double>(horizon)) / (p_star * gamma * gamma)));
}

/// Exploration bonus of the Sampling UCB index. Requires pulls >= 1.
inline double sampling_ucb_bonus(std::uint64_t pulls, double gamma) {
    const double n = static_cast<double>(pulls);
    const double level = gamma * gamma / (4.0 * (1.0 - gamma)) + std::log(std::numbers::pi * std::numbers::pi / 6.0);
    return std::sqrt((level + 2.0 * std::log(n)) / (2.0 * n));
}

inline double ucb_index(double empirical_mean, std::uint64_t pulls, double gamma) {
    return empirical_mean + sampling_ucb_bonus(pulls, gamma);
}

inline double classical_ucb_index(double empirical_mean, std::uint64_t pulls, double horizon) {
    return empirical_mean + std::sqrt(2.0 * std::log(horizon) / static_cast<double>(pulls));
}

struct SamplingIndex {
    double gamma = 0.5;

    double operator()(double mean, std::uint64_t pulls) const { return ucb_index(mean, pulls, gamma); }
    static constexpr const char* name() { return "sampling_ucb"; }
    nlohmann::json config() const { return {{"gamma", gamma}}; }
};

struct ClassicalIndex {
    double horizon = 2.0;

    double operator()(double mean, std::uint64_t pulls) const { return classical_ucb_index(mean, pulls, horizon); }
    static constexpr const char* name() { return "classical_ucb"; }
    nlohmann::json config() const { return nlohmann::json::object(); }
};

struct SamplingUcbConfig {
    double gamma = 0.5;
    std::optional<std::uint64_t> L;
    std::optional<double> p_star_hint;
    std::uint64_t horizon = 2;

    /// Size of the sampled set: the explicit L, or default_L from the p* hint
    /// (a lower bound on p* is a valid hint).
    std::uint64_t sampled_set_size() const {
        if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::ParameterOutOfRange, "gamma must be in (0,1)");
        if (L.has_value() == p_star_hint.has_value())
            fail(ErrorCode::ParameterOutOfRange, "exactly one of L and p_star_hint must be set");
        if (L) {
            if (*L < 1) fail(ErrorCode::ParameterOutOfRange, "L must be at least 1");
            return *L;
        }
        return default_L(horizon, *p_star_hint, gamma);
    }
};

/// UCB on a fixed set of L fresh arms. Ties in the index go to the lowest arm id.
template <typename IndexRule>
class UcbPolicy : public ClonablePolicy<UcbPolicy<IndexRule>> {
public:
    UcbPolicy(std::uint64_t sampled_set_size, std::uint64_t horizon, IndexRule rule)
        : size_(sampled_set_size), horizon_(horizon), rule_(rule) {
        if (size_ < 1) fail(ErrorCode::ParameterOutOfRange, "sampled set must hold at least one arm");
        arms_.reserve(size_);
    }

    Action next() override {
        if (pulls_ >= horizon_) return Halt{};
        if (pulls_ < size_) {
            if (arms_.size() == pulls_) return DrawFresh{};
            pending_ = pulls_;
            return PullExisting{arms_[pending_].arm_id};
        }
        pending_ = ranking_.begin()->local;
        return PullExisting{arms_[pending_].arm_id};
    }

    void on_drawn(ArmId arm_id) override { arms_.push_back(ArmStats{arm_id, 0, 0.0}); }

    void on_reward(ArmId, double reward) override {
        ArmStats& a = arms_[pending_];
        if (a.pulls > 0) ranking_.erase(entry(pending_));
        a.record(reward);
        ranking_.insert(entry(pending_));
        ++pulls_;
    }

    std::string name() const override { return IndexRule::name(); }
    nlohmann::json config() const override {
        auto cfg = rule_.config();
        cfg["L"] = size_;
        cfg["T"] = horizon_;
        return cfg;
    }

    const std::vector<ArmStats>& sampled_set() const { return arms_; }
    std::uint64_t sampled_set_size() const { return size_; }

private:
    struct Entry {
        double index;
        ArmId arm_id;
        std::size_t local;

        bool operator<(const Entry& o) const {
            if (index != o.index) return index > o.index;
            return arm_id < o.arm_id;
        }
    };

    Entry entry(std::size_t local) const {
        const ArmStats& a = arms_[local];
        return Entry{rule_(a.empirical_mean(), a.pulls), a.arm_id, local};
    }

    std::uint64_t size_;
    std::uint64_t horizon_;
    IndexRule rule_;
    std::vector<ArmStats> arms_;
    std::set<Entry> ranking_;
    std::uint64_t pulls_ = 0;
    std::size_t pending_ = 0;
};

using SamplingUcb = UcbPolicy<SamplingIndex>;
using ClassicalUcb = UcbPolicy<ClassicalIndex>;

inline SamplingUcb make_sampling_ucb(const SamplingUcbConfig& cfg) {
    return SamplingUcb(cfg.sampled_set_size(), cfg.horizon, SamplingIndex{cfg.gamma});
}

inline ClassicalUcb classical_ucb_baseline(std::uint64_t sampled_set_size, std::uint64_t horizon) {
    return ClassicalUcb(sampled_set_size, horizon, ClassicalIndex{static_cast<double>(horizon)});
}

} // namespace rbandit
