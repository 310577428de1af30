#pragma once

// Closed-form bounds for reservoir bandits. All logarithms are natural.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbandit/errors.hpp"

namespace rbandit::theory {

namespace detail {
inline void require(bool ok, const char* what) {
    if (!ok) fail(ErrorCode::ParameterOutOfRange, what);
}
inline double xlogx_ratio(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(x / y); }
} // namespace detail

/// KL divergence between Ber(p) and Ber(q), with 0 ln 0 = 0.
inline double kl_bernoulli(double p, double q) {
    detail::require(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0, "kl_bernoulli needs p, q in [0,1]");
    if ((q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0))
        fail(ErrorCode::DivergenceInfinite, "kl(p, q) is infinite for this q");
    return detail::xlogx_ratio(p, q) + detail::xlogx_ratio(1.0 - p, 1.0 - q);
}

enum class Tail { Lower, Upper };

/// exp(-gamma^2 n p / 4): bounds both P(S_n/n <= (1-gamma)p) and P(S_n/n >= (1+gamma)p),
/// so `tail` does not change the value.
inline double chernoff_bound(std::uint64_t n, double p, double gamma, [[maybe_unused]] Tail tail = Tail::Lower) {
    detail::require(n >= 1, "chernoff_bound needs n >= 1");
    detail::require(p >= 0.0 && p <= 1.0, "chernoff_bound needs p in [0,1]");
    detail::require(gamma >= 0.0 && gamma <= 1.0, "chernoff_bound needs gamma in [0,1]");
    return std::exp(-gamma * gamma * static_cast<double>(n) * p / 4.0);
}

/// Upper bound on n0 = inf{n >= 1 : A + B ln n <= n C}, valid for A >= C > 0, B >= 0.
inline double n0_bound(double a, double b, double c) {
    detail::require(c > 0.0 && a >= c && b >= 0.0, "n0_bound needs A >= C > 0 and B >= 0");
    return (a + b * std::log(2.0 * (b * b + a * c) / (c * c))) / c + 1.0;
}

/// Regret upper bound for Sampling UCB with L = ceil(4 ln T / (p* gamma^2)).
inline double ucb_regret_upper(double horizon, double p_star, double delta, double gamma) {
    detail::require(horizon >= 2.0, "ucb_regret_upper needs T >= 2");
    detail::require(gamma > 0.0 && gamma < 1.0, "ucb_regret_upper needs gamma in (0,1)");
    detail::require(delta > 0.0 && delta <= 1.0, "ucb_regret_upper needs delta in (0,1]");
    detail::require(p_star > 0.0 && p_star <= 1.0, "ucb_regret_upper needs p_star in (0,1]");
    const double inv = 1.0 / (1.0 - gamma);
    const double lead = 8.0 * std::log(horizon) / (p_star * delta * gamma * gamma);
    return lead * (10.0 * inv + 4.0 * std::log(24.0 * inv / std::pow(delta, 4))) + 1.0;
}

/// Minimax regret lower bound: min(max(ln(delta^2 T / 16), 0) / (33 p* delta), sqrt(T)).
inline double regret_lower(double horizon, double p_star, double delta) {
    detail::require(delta > 0.0 && delta < 0.25, "regret_lower needs delta in (0, 1/4)");
    detail::require(p_star > 0.0 && p_star <= 0.25, "regret_lower needs p_star in (0, 1/4]");
    detail::require(horizon >= 0.0, "regret_lower needs T >= 0");
    const double log_term = std::max(std::log(delta * delta * horizon / 16.0), 0.0);
    return std::min(log_term / (33.0 * p_star * delta), std::sqrt(horizon));
}

/// Best-arm error lower bound (1/4) exp(-T p* delta^2 / 32).
inline double bai_error_lower(double horizon, double p_star, double delta) {
    detail::require(delta > 0.0 && delta < 0.25, "bai_error_lower needs delta in (0, 1/4)");
    detail::require(p_star >= 0.0 && p_star <= 0.25, "bai_error_lower needs p_star in [0, 1/4]");
    detail::require(horizon >= 0.0, "bai_error_lower needs T >= 0");
    return 0.25 * std::exp(-horizon * p_star * delta * delta / 32.0);
}

/// The absolute constant c in the elimination error bound.
inline double elimination_constant(double epsilon) {
    detail::require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must be in (0,1]");
    const double c_bar = 0.5;
    const double c_eps = epsilon / 8.0;
    const double e2 = std::exp(2.0);
    return std::min(c_bar / 10.0, c_eps / (16.0 * e2 * std::log(200.0 * std::numbers::sqrt2)));
}

struct ProbabilityBound {
    double value = 0.0;
    /// value > 1: the bound says nothing. Never clipped.
    bool vacuous = false;
};

/// Error upper bound of fresh-arm elimination:
/// 8 ln T exp(-c_eps delta^2 p* T / (48 e^4 (14 ln(c_bar / (c delta^2)))^(1+eps))).
inline ProbabilityBound bai_error_upper(double horizon, double p_star, double delta, double epsilon) {
    detail::require(epsilon > 0.0 && epsilon <= 1.0, "bai_error_upper needs epsilon in (0,1]");
    detail::require(delta > 0.0 && delta < 1.0, "bai_error_upper needs delta in (0,1)");
    detail::require(p_star > 0.0 && p_star <= 1.0, "bai_error_upper needs p_star in (0,1]");
    detail::require(horizon >= 2.0, "bai_error_upper needs T >= 2");
    const double c = elimination_constant(epsilon);
    const double c_bar = 0.5;
    const double c_eps = epsilon / 8.0;
    const double log_term = 14.0 * std::log(c_bar / (c * delta * delta));
    const double exponent =
        c_eps * delta * delta * p_star * horizon / (48.0 * std::exp(4.0) * std::pow(log_term, 1.0 + epsilon));
    const double value = 8.0 * std::log(horizon) * std::exp(-exponent);
    return {value, value > 1.0};
}

struct AdaptivityFloor {
    bool applicable = false;
    double floor = 0.0;
};

/// Regret floor sqrt(T) delta / 4 on some problem with optimal proportion
/// q*, for any policy whose regret at proportion p* is at most c ln T / (p* delta).
/// Only the arithmetic conditions are evaluated; the regret premise is the caller's claim.
inline AdaptivityFloor adaptivity_floor(double horizon, double p_star, double q_star, double delta, double c) {
    detail::require(p_star > 0.0 && p_star <= 0.25, "adaptivity_floor needs p_star in (0, 1/4]");
    detail::require(c > 0.0 && delta > 0.0 && horizon >= 1.0, "adaptivity_floor needs c, delta > 0 and T >= 1");
    const double ratio = c * std::log(horizon) / (p_star * delta * delta);
    AdaptivityFloor out;
    out.applicable = horizon >= 4.0 * ratio * ratio && q_star <= 4.0 * p_star / c;
    out.floor = std::sqrt(horizon) * delta / 4.0;
    return out;
}

inline double bretagnolle_huber_rhs(double kl_value) { return 0.5 * std::exp(-kl_value); }

/// KL budget of the best-arm hard pair over T pulls: T p* delta^2 / (16 (1 - p*)).
inline double bai_pair_kl_budget(double horizon, double p_star, double delta) {
    detail::require(p_star >= 0.0 && p_star < 1.0, "bai_pair_kl_budget needs p_star in [0,1)");
    return horizon * p_star * delta * delta / (16.0 * (1.0 - p_star));
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

enum class BoundId { UcbRegretUpper, RegretLower, BaiErrorLower, BaiErrorUpper, AdaptivityFloor };

inline std::optional<BoundId> parse_bound_id(std::string_view s) {
    if (s == "ucb_regret_upper") return BoundId::UcbRegretUpper;
    if (s == "regret_lower") return BoundId::RegretLower;
    if (s == "bai_error_lower") return BoundId::BaiErrorLower;
    if (s == "bai_error_upper") return BoundId::BaiErrorUpper;
    if (s == "adaptivity_floor") return BoundId::AdaptivityFloor;
    return std::nullopt;
}

inline std::string_view to_string(BoundId id) {
    switch (id) {
    case BoundId::UcbRegretUpper: return "ucb_regret_upper";
    case BoundId::RegretLower: return "regret_lower";
    case BoundId::BaiErrorLower: return "bai_error_lower";
    case BoundId::BaiErrorUpper: return "bai_error_upper";
    case BoundId::AdaptivityFloor: return "adaptivity_floor";
    }
    return "unknown";
}

struct CurvePoint {
    double horizon = 0.0;
    double p_star = 0.0;
    double delta = 0.0;
    /// gamma for ucb_regret_upper, epsilon for bai_error_upper, unused otherwise.
    double gamma_or_epsilon = 0.0;
    double value = 0.0;
    bool vacuous = false;
};

struct TheoryCurve {
    BoundId bound;
    std::vector<CurvePoint> points;
};

struct CurveGrid {
    std::vector<double> horizon;
    std::vector<double> p_star;
    std::vector<double> delta;
    /// Defaults to {0.5} (gamma) or {1} (epsilon) when empty.
    std::vector<double> gamma_or_epsilon;
};

inline CurvePoint evaluate_bound(BoundId id, double horizon, double p_star, double delta, double param) {
    CurvePoint pt{horizon, p_star, delta, param, 0.0, false};
    switch (id) {
    case BoundId::UcbRegretUpper: pt.value = ucb_regret_upper(horizon, p_star, delta, param); break;
    case BoundId::RegretLower: pt.value = regret_lower(horizon, p_star, delta); break;
    case BoundId::BaiErrorLower: pt.value = bai_error_lower(horizon, p_star, delta); break;
    case BoundId::BaiErrorUpper: {
        const auto b = bai_error_upper(horizon, p_star, delta, param);
        pt.value = b.value;
        pt.vacuous = b.vacuous;
        break;
    }
    case BoundId::AdaptivityFloor: {
        // param is the constant c; q* is taken at its largest admissible value.
        const double c = param;
        const auto f = adaptivity_floor(horizon, p_star, 4.0 * p_star / c, delta, c);
        pt.value = f.floor;
        pt.vacuous = !f.applicable;
        break;
    }
    }
    return pt;
}

/// Evaluates a bound on the cross product T x p* x delta x parameter, in that nesting order.
inline TheoryCurve evaluate_curve(BoundId id, const CurveGrid& grid) {
    if (grid.horizon.empty() || grid.p_star.empty() || grid.delta.empty())
        fail(ErrorCode::ConfigInvalid, "curve grid dimensions must be non-empty");
    std::vector<double> params = grid.gamma_or_epsilon;
    if (params.empty()) params = {id == BoundId::UcbRegretUpper ? 0.5 : 1.0};
    TheoryCurve curve{id, {}};
    for (double t : grid.horizon)
        for (double p : grid.p_star)
            for (double d : grid.delta)
                for (double g : params) curve.points.push_back(evaluate_bound(id, t, p, d, g));
    return curve;
}

} // namespace rbandit::theory
