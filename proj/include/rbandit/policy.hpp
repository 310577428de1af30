#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "rbandit/reservoir.hpp"

namespace rbandit {

/// Play an arm that has already been drawn. Consumes one unit of budget.
struct PullExisting {
    ArmId arm_id;
};
/// Ask the reservoir for a fresh arm. Costs no budget; the new id is reported
/// through Policy::on_drawn before the next decision.
struct DrawFresh {};
/// The policy is finished; the engine collects its recommendation.
struct Halt {};

using Action = std::variant<PullExisting, DrawFresh, Halt>;

/// Running statistics for one arm, as seen by a policy.
struct ArmStats {
    ArmId arm_id = 0;
    std::uint64_t pulls = 0;
    double reward_sum = 0.0;

    void record(double reward) {
        ++pulls;
        reward_sum += reward;
    }
    /// Undefined (NaN) before the first pull.
    double empirical_mean() const {
        return pulls == 0 ? std::numeric_limits<double>::quiet_NaN() : reward_sum / static_cast<double>(pulls);
    }
};

/// Sequential decision-maker driven by the engine.
///
/// The engine calls next() repeatedly. A DrawFresh is answered by on_drawn()
/// with the id of the new arm; a PullExisting is answered by on_reward().
/// Policies never see arm types. A policy must be deterministic given the
/// sequence of callbacks it received, and clone() must copy its full state;
/// the exact-enumeration oracle relies on both.
class Policy {
public:
    virtual ~Policy() = default;

    virtual Action next() = 0;
    virtual void on_drawn(ArmId arm_id) = 0;
    virtual void on_reward(ArmId arm_id, double reward) = 0;

    /// Best-arm policies return their pick; cumulative-regret policies return nullopt.
    virtual std::optional<ArmId> recommend() const { return std::nullopt; }
    virtual bool makes_recommendation() const { return false; }

    virtual std::unique_ptr<Policy> clone() const = 0;
    virtual std::string name() const = 0;
    /// Configuration echoed into result metadata.
    virtual nlohmann::json config() const { return nlohmann::json::object(); }
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// CRTP helper supplying clone() for copyable policies.
template <typename Derived>
class ClonablePolicy : public Policy {
public:
    std::unique_ptr<Policy> clone() const override {
        return std::make_unique<Derived>(static_cast<const Derived&>(*this));
    }
};

} // namespace rbandit
