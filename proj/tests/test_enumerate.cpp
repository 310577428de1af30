#include "catch_amalgamated.hpp"

#include <numbers>

#include "helpers.hpp"
#include "rbandit/elimination.hpp"
#include "rbandit/engine.hpp"
#include "rbandit/enumerate.hpp"
#include "rbandit/sampling_ucb.hpp"

using namespace rbandit;
using namespace testing;
using Catch::Approx;

namespace {

/// Expected regret of Sampling UCB with L arms by looping over all type
/// assignments and all 2^T reward bit patterns, replaying the index rule by hand.
double brute_force_ucb(const std::vector<double>& means, const std::vector<double>& probs, std::size_t L,
                       std::size_t T, double gamma) {
    const double mu_star = *std::max_element(means.begin(), means.end());
    const double c = gamma * gamma / (4 * (1 - gamma)) + std::log(std::numbers::pi * std::numbers::pi / 6);
    const std::size_t K = means.size();
    std::size_t assignments = 1;
    for (std::size_t i = 0; i < L; ++i) assignments *= K;

    double total = 0.0;
    for (std::size_t code = 0; code < assignments; ++code) {
        std::vector<std::size_t> type(L);
        double p_assign = 1.0;
        for (std::size_t i = 0, x = code; i < L; ++i, x /= K) {
            type[i] = x % K;
            p_assign *= probs[type[i]];
        }
        if (p_assign == 0.0) continue;
        for (std::size_t bits = 0; bits < (std::size_t{1} << T); ++bits) {
            std::vector<double> sum(L, 0.0);
            std::vector<double> n(L, 0.0);
            double p = p_assign, regret = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                std::size_t a = t;
                if (t >= L) {
                    a = 0;
                    double best = -1e300;
                    for (std::size_t j = 0; j < L; ++j) {
                        const double u = sum[j] / n[j] + std::sqrt((c + 2 * std::log(n[j])) / (2 * n[j]));
                        if (u > best) {
                            best = u;
                            a = j;
                        }
                    }
                }
                const double mu = means[type[a]];
                const bool one = (bits >> t) & 1;
                p *= one ? mu : 1 - mu;
                sum[a] += one;
                n[a] += 1;
                regret += mu_star - mu;
            }
            total += p * regret;
        }
    }
    return total;
}

} // namespace

TEST_CASE("an all-optimal reservoir has zero expected regret", "[enumerate]") {
    Reservoir r({ber(1.0, 1.0), ber(0.0, 0.0)});
    PolicyFactory f = [] { return std::make_unique<SamplingUcb>(2, 3, SamplingIndex{0.5}); };
    const auto e = enumerate_exact(r, f, 3, 2);
    CHECK(e.expected_regret == 0.0);
    CHECK(e.probability_mass == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one fresh arm pulled once", "[enumerate]") {
    Reservoir r({ber(0.9, 0.5), ber(0.3, 0.5)});
    PolicyFactory f = [] { return std::make_unique<FixedArm>(1, 0, 1); };
    const auto e = enumerate_exact(r, f, 1, 1);
    CHECK(e.expected_regret == Approx(0.5 * 0.0 + 0.5 * 0.6).epsilon(1e-12));
    CHECK(e.probability_mass == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampling UCB exact value matches a brute-force replay", "[enumerate]") {
    Reservoir r({ber(0.9, 0.5), ber(0.3, 0.5)});
    PolicyFactory f = [] { return std::make_unique<SamplingUcb>(2, 6, SamplingIndex{0.5}); };
    const auto e = enumerate_exact(r, f, 6, 2);
    CHECK(e.probability_mass == Approx(1.0).epsilon(1e-12));
    CHECK(e.expected_regret == Approx(brute_force_ucb({0.9, 0.3}, {0.5, 0.5}, 2, 6, 0.5)).epsilon(1e-12));

    Reservoir r3({ber(0.7, 0.2), ber(0.5, 0.3), ber(0.2, 0.5)});
    PolicyFactory f3 = [] { return std::make_unique<SamplingUcb>(3, 7, SamplingIndex{0.3}); };
    CHECK(enumerate_exact(r3, f3, 7, 3).expected_regret ==
          Approx(brute_force_ucb({0.7, 0.5, 0.2}, {0.2, 0.3, 0.5}, 3, 7, 0.3)).epsilon(1e-12));
}

TEST_CASE("Monte Carlo agrees with enumeration", "[enumerate]") {
    Reservoir r({ber(0.9, 0.5), ber(0.3, 0.5)});
    PolicyFactory ucb = [] { return std::make_unique<SamplingUcb>(2, 6, SamplingIndex{0.5}); };
    const auto e = enumerate_exact(r, ucb, 6, 2);
    const auto mc = run_trials(r, ucb, 6, 20000, 1);
    CHECK(std::abs(mc.stats.mean_regret - e.expected_regret) <= 4 * mc.stats.se_regret);

    PolicyFactory elim = [] { return std::make_unique<FreshArmElimination>(EliminationConfig{1.0, 8}); };
    const auto ee = enumerate_exact(r, elim, 8, 8);
    REQUIRE(ee.error_probability.has_value());
    const auto me = run_trials(r, elim, 8, 20000, 2);
    const double p = *ee.error_probability;
    CHECK(std::abs(*me.stats.error_rate - p) <= 4 * std::sqrt(p * (1 - p) / 20000));
    CHECK(std::abs(me.stats.mean_regret - ee.expected_regret) <= 4 * me.stats.se_regret);
}

TEST_CASE("enumeration guards", "[enumerate]") {
    Reservoir r({ber(0.9, 0.5), ber(0.3, 0.5)});
    PolicyFactory f = [] { return std::make_unique<SamplingUcb>(2, 40, SamplingIndex{0.5}); };
    CHECK(code_of([&] { enumerate_exact(r, f, 40, 2); }) == ErrorCode::EnumerationTooLarge);

    PolicyFactory f3 = [] { return std::make_unique<SamplingUcb>(3, 6, SamplingIndex{0.5}); };
    CHECK(code_of([&] { enumerate_exact(r, f3, 6, 2); }) == ErrorCode::EnumerationTooLarge);

    Reservoir d({{0.5, 0.5, Discrete{{0.0, 1.0}, {0.5, 0.5}}}, ber(0.1, 0.5)});
    CHECK(code_of([&] { enumerate_exact(d, f, 4, 2); }) == ErrorCode::NonBernoulliSupport);
}
