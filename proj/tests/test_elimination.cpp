#include "catch_amalgamated.hpp"

#include <map>

#include "helpers.hpp"
#include "rbandit/elimination.hpp"
#include "rbandit/engine.hpp"

using namespace rbandit;
using namespace testing;
using Catch::Approx;

namespace {

/// Drives a policy with rewards chosen by `reward(arm, round_pull_index)` and
/// returns the number of pulls.
template <typename Reward>
std::uint64_t drive(Policy& p, Reward reward) {
    ArmId next_id = 0;
    std::uint64_t pulls = 0;
    std::map<ArmId, std::uint64_t> per_arm;
    for (;;) {
        const auto a = p.next();
        if (std::holds_alternative<Halt>(a)) return pulls;
        if (std::holds_alternative<DrawFresh>(a)) {
            p.on_drawn(next_id++);
            continue;
        }
        const ArmId id = std::get<PullExisting>(a).arm_id;
        p.on_reward(id, reward(id, per_arm[id]++));
        ++pulls;
    }
}

} // namespace

TEST_CASE("initial set size", "[elimination]") {
    CHECK(initial_set_size(1024) == 512);
    CHECK(initial_set_size(1001) == 500);
    CHECK(initial_set_size(2) == 1);
    CHECK(code_of([] { initial_set_size(1); }) == ErrorCode::BudgetTooSmall);
    CHECK(initial_set_size(1024, 1.0 / 16) == 64);
}

TEST_CASE("pulls per arm", "[elimination]") {
    CHECK(pulls_per_arm(1024, 1.0, 512, 1) == 1);
    CHECK(pulls_per_arm(1024, 1.0, 384, 2) == 1);
    CHECK(pulls_per_arm(4096, 1.0, 64, 2) == 2);
    // floor(eps/8 * T / (K * i^(1+eps)))
    CHECK(pulls_per_arm(100000, 0.5, 10, 3) == static_cast<std::uint64_t>(0.0625 * 100000 / (10 * std::pow(3, 1.5))));
}

TEST_CASE("set size recurrence", "[elimination]") {
    std::vector<std::uint64_t> ks{512};
    while (ks.size() < 5) ks.push_back(next_set_size(ks.back()));
    CHECK(ks == std::vector<std::uint64_t>{512, 384, 288, 216, 162});

    std::vector<std::uint64_t> hs{512};
    while (hs.size() < 4) hs.push_back(next_set_size(hs.back(), false));
    CHECK(hs == std::vector<std::uint64_t>{512, 256, 128, 64});

    CHECK(survivors_count(3) == 1);
    CHECK(next_set_size(3) == 1);
    CHECK(next_set_size(2) == 1);
    CHECK(next_set_size(1) == 1);
}

TEST_CASE("set sizes stay inside the envelope", "[elimination]") {
    for (std::uint64_t k1 = 1; k1 <= 4000; ++k1) {
        std::uint64_t k = k1;
        for (int i = 1; i <= 40; ++i) {
            const double upper = std::max(std::pow(0.75, i - 1) * static_cast<double>(k1), 1.0);
            const double lower = std::pow(0.5, i - 1) * static_cast<double>(k1) - 4.0;
            REQUIRE(static_cast<double>(k) <= upper + 1e-9);
            REQUIRE(static_cast<double>(k) >= lower - 1e-9);
            k = next_set_size(k);
        }
    }
}

TEST_CASE("round schedule", "[elimination]") {
    const auto s = round_schedule(1024, 1.0);
    REQUIRE(s.size() == 2);
    CHECK(s[0].active == 512);
    CHECK(s[0].pulls_per_arm == 1);
    CHECK(s[0].fresh == 128);
    CHECK(s[1].active == 384);
    CHECK(s[1].pulls_per_arm == 1);

    for (std::uint64_t T : {2u, 3u, 10u, 100u, 777u, 5000u}) {
        for (double eps : {0.25, 1.0}) {
            for (double cb : {0.5, 1.0 / 16}) {
                if (std::floor(cb * T) < 1) continue;
                std::uint64_t planned = 0;
                for (const auto& r : round_schedule(T, eps, true, cb)) {
                    REQUIRE(2 * planned <= T);
                    REQUIRE(r.active > 1);
                    planned += r.active * r.pulls_per_arm;
                }
                REQUIRE(planned <= T);
            }
        }
    }
    CHECK(code_of([] { round_schedule(100, 0.0); }) == ErrorCode::ParameterOutOfRange);
    CHECK(code_of([] { round_schedule(100, 1.5); }) == ErrorCode::ParameterOutOfRange);
}

TEST_CASE("survivor selection and recommendation", "[elimination]") {
    const std::vector<ArmId> ids{4, 2, 9, 7};
    const std::vector<double> means{0.5, 0.9, 0.5, 0.1};
    CHECK(select_survivors(ids, means, 2) == std::vector<ArmId>{2, 4});
    const std::vector<double> flat{0.3, 0.3, 0.3, 0.3};
    CHECK(select_survivors(ids, flat, 2) == std::vector<ArmId>{2, 4});

    const std::vector<ArmId> one{7};
    const std::vector<std::optional<double>> m1{std::nullopt};
    CHECK(recommend_from(one, m1) == ArmId{7});
    const std::vector<ArmId> two{1, 2};
    const std::vector<std::optional<double>> m2{0.6, 0.4};
    CHECK(recommend_from(two, m2) == ArmId{1});
    const std::vector<ArmId> two_rev{2, 1};
    const std::vector<std::optional<double>> eq{0.5, 0.5};
    CHECK(recommend_from(two_rev, eq) == ArmId{1});
}

TEST_CASE("elimination rounds use round-local means", "[elimination]") {
    // T = 64, c_bar = 1/16: K = 4, 3, 1 with t = 2, 1.
    EliminationConfig cfg{1.0, 64, true, 1.0 / 16};
    FreshArmElimination p(cfg);
    REQUIRE(p.schedule().size() == 2);
    CHECK(p.schedule()[0].active == 4);
    CHECK(p.schedule()[0].pulls_per_arm == 2);
    CHECK(p.schedule()[1].active == 3);
    CHECK(p.schedule()[1].pulls_per_arm == 1);

    // Round 1: arms 0 and 1 win. Round 2: arm 0 scores 0 while fresh arm 4 scores 1,
    // even though arm 0's lifetime mean would still be higher than arm 4's.
    const auto pulls = drive(p, [](ArmId id, std::uint64_t k) {
        if (id == 4) return 1.0;
        if (k < 2) return id <= 1 ? 1.0 : 0.0;
        return 0.0;
    });
    CHECK(pulls == 4 * 2 + 3 * 1);
    const auto& rounds = p.rounds();
    REQUIRE(rounds.size() == 2);
    CHECK(rounds[0].survivors == std::vector<ArmId>{0, 1});
    CHECK(rounds[0].added == std::vector<ArmId>{4});
    CHECK(rounds[1].active == std::vector<ArmId>{0, 1, 4});
    CHECK(rounds[1].round_means == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(rounds[1].survivors == std::vector<ArmId>{4});
    CHECK(p.recommend() == ArmId{4});
}

TEST_CASE("each active arm is pulled t_i times per round", "[elimination]") {
    EliminationConfig cfg{0.5, 3000, true, 1.0 / 32};
    FreshArmElimination p(cfg);
    std::map<ArmId, std::uint64_t> count;
    drive(p, [&](ArmId id, std::uint64_t) {
        ++count[id];
        return static_cast<double>(id % 3 == 0);
    });
    std::map<ArmId, std::uint64_t> expected;
    for (const auto& r : p.rounds()) {
        REQUIRE(r.active.size() == r.plan.active);
        for (ArmId id : r.active) expected[id] += r.plan.pulls_per_arm;
        REQUIRE(r.survivors.size() == survivors_count(r.plan.active));
        REQUIRE(r.added.size() == r.plan.fresh);
    }
    CHECK(count == expected);
}

TEST_CASE("elimination episodes respect the budget", "[elimination]") {
    Reservoir r({ber(0.8, 0.2), ber(0.5, 0.8)});
    for (std::uint64_t T : {2u, 3u, 8u, 50u, 1000u}) {
        for (bool fresh : {true, false}) {
            FreshArmElimination p(EliminationConfig{1.0, T, fresh, 0.5});
            const auto res = run_episode(r, p, T, T);
            CHECK(res.pulls_used <= T);
            CHECK(res.is_error.has_value());
            CHECK(res.recommended_arm.has_value());
        }
    }
}

TEST_CASE("halving baseline never adds arms", "[elimination]") {
    auto p = baseline_halving_no_fresh(1024, 1.0);
    CHECK(p.name() == "halving");
    for (const auto& r : p.schedule()) CHECK(r.fresh == 0);
    CHECK(p.schedule()[1].active == 256);
}

TEST_CASE("uniform commit", "[elimination]") {
    Reservoir r({ber(0.8, 0.5), ber(0.5, 0.5)});
    {
        UniformCommit p(1, 10);
        const auto res = run_episode(r, p, 10, 1);
        CHECK(res.recommended_arm == ArmId{0});
        CHECK(res.pulls_used == 10);
    }
    {
        UniformCommit p(10, 10);
        EpisodeTrace t;
        run_episode(r, p, 10, 1, {}, &t);
        for (const auto& a : t.arms) CHECK(a.pulls == 1);
    }
    {
        UniformCommit p(3, 10);
        EpisodeTrace t;
        const auto res = run_episode(r, p, 10, 4, {}, &t);
        CHECK(res.pulls_used == 9);
        // recommendation is the best empirical mean, ties to the lowest id
        std::size_t best = 0;
        for (std::size_t j = 1; j < t.arms.size(); ++j)
            if (t.arms[j].empirical_mean() > t.arms[best].empirical_mean()) best = j;
        CHECK(res.recommended_arm == ArmId{best});
    }
    CHECK(code_of([] { UniformCommit(11, 10); }) == ErrorCode::ParameterOutOfRange);
    CHECK(code_of([] { UniformCommit(0, 10); }) == ErrorCode::ParameterOutOfRange);
}
