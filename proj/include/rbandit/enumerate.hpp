#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rbandit/errors.hpp"
#include "rbandit/policy.hpp"
#include "rbandit/reservoir.hpp"

namespace rbandit {

inline constexpr double kEnumerationBudget = 1e7;

struct ExactResult {
    double expected_regret = 0.0;
    /// Present when the policy makes a recommendation.
    std::optional<double> error_probability;
    /// Total probability of all enumerated paths; 1 up to rounding.
    double probability_mass = 0.0;
    std::uint64_t leaves = 0;
};

namespace detail {

class ExactEnumerator {
public:
    ExactEnumerator(const Reservoir& reservoir, std::uint64_t horizon, std::uint64_t fresh_cap)
        : reservoir_(reservoir), horizon_(horizon), fresh_cap_(fresh_cap) {}

    void explore(std::unique_ptr<Policy> policy, std::vector<std::size_t> arm_types, std::uint64_t pulls,
                 double regret, double prob) {
        for (;;) {
            const Action action = policy->next();
            if (std::holds_alternative<Halt>(action)) {
                finish(*policy, arm_types, regret, prob);
                return;
            }
            if (std::holds_alternative<DrawFresh>(action)) {
                if (arm_types.size() >= fresh_cap_)
                    fail(ErrorCode::EnumerationTooLarge,
                         "policy drew more than the fresh-arm cap of " + std::to_string(fresh_cap_));
                const ArmId id = arm_types.size();
                const auto& types = reservoir_.types();
                for (std::size_t k = 0; k < types.size(); ++k) {
                    if (types[k].probability <= 0.0) continue;
                    auto branch = policy->clone();
                    auto branch_types = arm_types;
                    branch_types.push_back(k);
                    branch->on_drawn(id);
                    explore(std::move(branch), std::move(branch_types), pulls, regret, prob * types[k].probability);
                }
                return;
            }

            const ArmId id = std::get<PullExisting>(action).arm_id;
            if (id >= arm_types.size()) fail(ErrorCode::InvalidAction, "pull of undrawn arm " + std::to_string(id));
            if (pulls >= horizon_) fail(ErrorCode::PolicyOverBudget, "pull requested after budget exhausted");
            const double mean = reservoir_.type(arm_types[id]).mean;
            regret += reservoir_.mu_star() - mean;
            ++pulls;
            if (mean >= 1.0) {
                policy->on_reward(id, 1.0);
            } else if (mean <= 0.0) {
                policy->on_reward(id, 0.0);
            } else {
                auto success = policy->clone();
                success->on_reward(id, 1.0);
                explore(std::move(success), arm_types, pulls, regret, prob * mean);
                policy->on_reward(id, 0.0);
                prob *= 1.0 - mean;
            }
        }
    }

    ExactResult result() const { return result_; }

private:
    void finish(const Policy& policy, const std::vector<std::size_t>& arm_types, double regret, double prob) {
        if (++result_.leaves > static_cast<std::uint64_t>(kEnumerationBudget))
            fail(ErrorCode::EnumerationTooLarge, "more than 1e7 outcome paths");
        result_.probability_mass += prob;
        result_.expected_regret += prob * regret;
        if (policy.makes_recommendation()) {
            const auto rec = policy.recommend();
            bool error = true;
            if (rec) {
                if (*rec >= arm_types.size()) fail(ErrorCode::InvalidAction, "recommended arm was never drawn");
                error = reservoir_.type(arm_types[*rec]).mean != reservoir_.mu_star();
            }
            result_.error_probability = result_.error_probability.value_or(0.0) + (error ? prob : 0.0);
        }
    }

    const Reservoir& reservoir_;
    std::uint64_t horizon_;
    std::uint64_t fresh_cap_;
    ExactResult result_;
};

} // namespace detail

/// Exact expected pseudo-regret and error probability of a deterministic
/// policy, by summing over every type assignment of the drawn arms and every
/// Bernoulli reward path. Independent of the sampling engine; used as its
/// oracle. Requires K^fresh_cap * 2^horizon <= 1e7.
inline ExactResult enumerate_exact(const Reservoir& reservoir, const PolicyFactory& factory, std::uint64_t horizon,
                                   std::uint64_t fresh_cap) {
    if (!reservoir.all_bernoulli()) fail(ErrorCode::NonBernoulliSupport, "enumeration needs Bernoulli arm types");
    const double log_size = static_cast<double>(fresh_cap) * std::log(static_cast<double>(reservoir.size())) +
                            static_cast<double>(horizon) * std::log(2.0);
    if (log_size > std::log(kEnumerationBudget))
        fail(ErrorCode::EnumerationTooLarge, "K^L_cap * 2^T exceeds 1e7");
    detail::ExactEnumerator en(reservoir, horizon, fresh_cap);
    en.explore(factory(), {}, 0, 0.0, 1.0);
    return en.result();
}

} // namespace rbandit
