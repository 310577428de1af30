#pragma once

#include "catch_amalgamated.hpp"

#include "rbandit/errors.hpp"
#include "rbandit/policy.hpp"

namespace testing {

using namespace rbandit;

inline ArmTypeSpec ber(double mean, double prob) { return {mean, prob, Bernoulli{}}; }

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an rbandit::Error");
    return ErrorCode::IoError;
}

/// Draws `arms` fresh arms, then pulls arm `target` for `pulls` rounds.
class FixedArm : public ClonablePolicy<FixedArm> {
public:
    FixedArm(std::uint64_t arms, ArmId target, std::uint64_t pulls, bool recommend = false)
        : arms_(arms), target_(target), pulls_(pulls), recommend_(recommend) {}

    Action next() override {
        if (drawn_ < arms_) return DrawFresh{};
        if (done_ < pulls_) return PullExisting{target_};
        return Halt{};
    }
    void on_drawn(ArmId) override { ++drawn_; }
    void on_reward(ArmId, double) override { ++done_; }
    bool makes_recommendation() const override { return recommend_; }
    std::optional<ArmId> recommend() const override {
        if (!recommend_) return std::nullopt;
        return target_;
    }
    std::string name() const override { return "fixed"; }

private:
    std::uint64_t arms_;
    ArmId target_;
    std::uint64_t pulls_;
    bool recommend_;
    std::uint64_t drawn_ = 0;
    std::uint64_t done_ = 0;
};

/// Draws forever.
class EndlessDraw : public ClonablePolicy<EndlessDraw> {
public:
    Action next() override { return DrawFresh{}; }
    void on_drawn(ArmId) override {}
    void on_reward(ArmId, double) override {}
    std::string name() const override { return "endless"; }
};

/// Recommending policy that never recommends.
class Mute : public ClonablePolicy<Mute> {
public:
    Action next() override { return Halt{}; }
    void on_drawn(ArmId) override {}
    void on_reward(ArmId, double) override {}
    bool makes_recommendation() const override { return true; }
    std::string name() const override { return "mute"; }
};

} // namespace testing
