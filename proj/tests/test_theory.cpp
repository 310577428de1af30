#include "catch_amalgamated.hpp"

#include <random>

#include "helpers.hpp"
#include "rbandit/theory.hpp"

using namespace rbandit;
using namespace rbandit::theory;
using namespace testing;
using Catch::Approx;

namespace {

/// P(Bin(n, p) <= k), summed term by term.
double binom_cdf(int n, double p, int k) {
    double s = 0.0;
    for (int j = 0; j <= k && j <= n; ++j)
        s += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(p) +
                      (n - j) * std::log1p(-p));
    return s;
}

double binom_upper(int n, double p, int k) { return 1.0 - binom_cdf(n, p, k - 1); }

std::uint64_t brute_n0(double a, double b, double c) {
    for (std::uint64_t n = 1;; ++n)
        if (a + b * std::log(static_cast<double>(n)) <= static_cast<double>(n) * c) return n;
}

} // namespace

TEST_CASE("bernoulli kl values", "[theory]") {
    CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
    CHECK(kl_bernoulli(0.25, 0.75) == Approx(0.5 * std::log(3.0)).margin(1e-12));
    CHECK(kl_bernoulli(0.25, 0.75) == Approx(0.549306).margin(1e-6));
    CHECK(kl_bernoulli(0.3, 0.5) == Approx(0.082283).margin(1e-6));
    CHECK(kl_bernoulli(0.0, 0.5) == Approx(std::log(2.0)));
    CHECK(code_of([] { kl_bernoulli(0.5, 0.0); }) == ErrorCode::DivergenceInfinite);
    CHECK(code_of([] { kl_bernoulli(0.5, 1.0); }) == ErrorCode::DivergenceInfinite);
    CHECK(code_of([] { kl_bernoulli(1.5, 0.5); }) == ErrorCode::ParameterOutOfRange);
}

TEST_CASE("kl is nonnegative and dominates Pinsker", "[theory]") {
    for (int i = 0; i <= 100; ++i)
        for (int j = 1; j < 100; ++j) {
            const double p = i / 100.0, q = j / 100.0;
            const double kl = kl_bernoulli(p, q);
            REQUIRE(kl >= 0.0);
            REQUIRE(kl >= 2 * (p - q) * (p - q) - 1e-15);
            if (i == j) REQUIRE(kl == Approx(0.0).margin(1e-15));
        }
}

TEST_CASE("chernoff bound values", "[theory]") {
    CHECK(chernoff_bound(10, 0.5, 1.0) == Approx(std::exp(-1.25)).epsilon(1e-12));
    CHECK(chernoff_bound(10, 0.5, 1.0) == Approx(0.286505).margin(1e-6));
    CHECK(binom_cdf(10, 0.5, 0) == Approx(std::pow(2.0, -10)));
    CHECK(chernoff_bound(10, 0.3, 0.0) == 1.0);
}

TEST_CASE("chernoff bound dominates exact binomial tails", "[theory]") {
    for (int n = 1; n <= 30; ++n)
        for (int pi = 1; pi <= 9; ++pi)
            for (int gi = 1; gi <= 10; ++gi) {
                const double p = pi / 10.0, g = gi / 10.0;
                const double bound = chernoff_bound(n, p, g);
                // S_n <= (1 - g) n p
                const int klo = static_cast<int>(std::floor((1 - g) * n * p + 1e-12));
                REQUIRE(binom_cdf(n, p, klo) <= bound + 1e-12);
                // S_n >= (1 + g) n p
                const int khi = static_cast<int>(std::ceil((1 + g) * n * p - 1e-12));
                REQUIRE(binom_upper(n, p, khi) <= bound + 1e-12);
            }
}

TEST_CASE("n0 bound dominates the brute-force scan", "[theory]") {
    CHECK(brute_n0(1, 0, 1) == 1);
    CHECK(n0_bound(1, 0, 1) == Approx(2.0));
    CHECK(static_cast<double>(brute_n0(10, 2, 1)) <= n0_bound(10, 2, 1));

    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> cdist(0.05, 2.0), scale(1.0, 50.0), bdist(0.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double c = cdist(gen);
        const double a = c * scale(gen);
        const double b = bdist(gen);
        REQUIRE(static_cast<double>(brute_n0(a, b, c)) <= n0_bound(a, b, c));
    }
    CHECK(code_of([] { n0_bound(0.5, 0, 1); }) == ErrorCode::ParameterOutOfRange);
}

TEST_CASE("ucb regret upper bound", "[theory]") {
    const double lead = 8 * std::log(100.0) / (0.1 * 0.2 * 0.25);
    const double expected = lead * (10 / 0.5 + 4 * std::log(24 / 0.5 / std::pow(0.2, 4))) + 1;
    CHECK(ucb_regret_upper(100, 0.1, 0.2, 0.5) == Approx(expected).epsilon(1e-12));
    CHECK(ucb_regret_upper(100, 0.1, 0.2, 0.5) == Approx(4.51203e5).margin(1.0));
    for (double p : {0.1, 0.2, 0.3}) CHECK(ucb_regret_upper(1e4, p + 0.1, 0.2, 0.5) < ucb_regret_upper(1e4, p, 0.2, 0.5));
    CHECK(ucb_regret_upper(1e5, 0.1, 0.2, 0.5) > ucb_regret_upper(1e4, 0.1, 0.2, 0.5));
}

TEST_CASE("regret lower bound", "[theory]") {
    CHECK(regret_lower(1e4, 0.1, 0.2) == Approx(std::log(0.04 * 1e4 / 16) / (33 * 0.02)).margin(1e-12));
    CHECK(regret_lower(1e4, 0.1, 0.2) == Approx(4.87709).margin(1e-4));
    CHECK(regret_lower(400, 0.1, 0.2) == Approx(0.0).margin(1e-12));
    CHECK(regret_lower(399, 0.1, 0.2) == 0.0);
    CHECK(regret_lower(100, 0.1, 0.2) == 0.0);
    CHECK(regret_lower(1e30, 0.1, 0.2) == Approx(std::log(0.04 * 1e30 / 16) / 0.66));
    CHECK(regret_lower(1e4, 0.001, 0.2) == 100.0);
}

TEST_CASE("bai error lower bound", "[theory]") {
    CHECK(bai_error_lower(1000, 0.1, 0.2) == Approx(0.25 * std::exp(-0.125)).epsilon(1e-12));
    CHECK(bai_error_lower(1000, 0.1, 0.2) == Approx(0.220624).margin(1e-6));
    CHECK(bai_error_lower(0, 0.1, 0.2) == 0.25);
    CHECK(bai_error_lower(2000, 0.1, 0.2) < bai_error_lower(1000, 0.1, 0.2));
    CHECK(bai_error_lower(1000, 0.2, 0.2) < bai_error_lower(1000, 0.1, 0.2));
    CHECK(bai_error_lower(1000, 0.1, 0.21) < bai_error_lower(1000, 0.1, 0.2));
}

TEST_CASE("elimination error upper bound", "[theory]") {
    const double c = elimination_constant(1.0);
    CHECK(c == Approx(0.125 / (16 * std::exp(2.0) * std::log(200 * std::sqrt(2.0)))).epsilon(1e-12));
    CHECK(c == Approx(1.8730e-4).margin(1e-8));
    const auto b = bai_error_upper(1e6, 0.2, 0.2, 1.0);
    CHECK(b.value == Approx(110.5).margin(0.1));
    CHECK(b.vacuous);
    // far out the exponential wins and the bound becomes informative
    const auto far = bai_error_upper(1e12, 0.2, 0.2, 1.0);
    CHECK(far.value < 1.0);
    CHECK_FALSE(far.vacuous);
    CHECK(bai_error_upper(2e12, 0.2, 0.2, 1.0).value < far.value);
}

TEST_CASE("adaptivity floor", "[theory]") {
    const auto f = adaptivity_floor(1e6, 0.1, 0.01, 0.2, 1.0);
    CHECK_FALSE(f.applicable);
    const double ratio = std::log(1e6) / (0.1 * 0.04);
    CHECK(4 * ratio * ratio == Approx(4.77e7).epsilon(1e-3));

    const auto g = adaptivity_floor(1e8, 0.25, 0.01, 0.2, 0.01);
    CHECK(g.applicable);
    CHECK(g.floor == Approx(500.0));
    CHECK_FALSE(adaptivity_floor(1e8, 0.25, 200.0, 0.2, 0.01).applicable);
}

TEST_CASE("bretagnolle-huber and pair budget", "[theory]") {
    CHECK(bretagnolle_huber_rhs(0.0) == 0.5);
    CHECK(bretagnolle_huber_rhs(std::log(2.0)) == Approx(0.25));
    for (double k = 0; k < 5; k += 0.25) CHECK(bretagnolle_huber_rhs(k + 0.25) < bretagnolle_huber_rhs(k));
    CHECK(bretagnolle_huber_rhs(bai_pair_kl_budget(500, 0.1, 0.2)) == Approx(0.5 * std::exp(-500 * 0.1 * 0.04 / 14.4)));
    CHECK(bretagnolle_huber_rhs(bai_pair_kl_budget(500, 0.1, 0.2)) == Approx(0.4352).margin(1e-4));
}

TEST_CASE("curves", "[theory]") {
    CurveGrid g{{1e2, 1e3, 1e4, 1e5}, {0.1}, {0.2}, {}};
    const auto c = evaluate_curve(BoundId::BaiErrorLower, g);
    REQUIRE(c.points.size() == 4);
    for (std::size_t i = 1; i < 4; ++i) CHECK(c.points[i].value < c.points[i - 1].value);

    const auto u = evaluate_curve(BoundId::BaiErrorUpper, {{100, 1000}, {0.2}, {0.2}, {1.0}});
    for (const auto& p : u.points) CHECK(p.vacuous);

    CHECK(code_of([] { evaluate_curve(BoundId::RegretLower, {{}, {0.1}, {0.2}, {}}); }) == ErrorCode::ConfigInvalid);
    CHECK_FALSE(parse_bound_id("nope").has_value());
    CHECK(parse_bound_id("ucb_regret_upper") == BoundId::UcbRegretUpper);

    // bit-identical on repeat
    const auto a = evaluate_curve(BoundId::UcbRegretUpper, g);
    const auto b = evaluate_curve(BoundId::UcbRegretUpper, g);
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].value == b.points[i].value);
}
