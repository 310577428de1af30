#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rbandit/errors.hpp"
#include "rbandit/random.hpp"

namespace rbandit {

inline constexpr double kSpecTolerance = 1e-12;

struct Bernoulli {};

/// Finite distribution on [0,1].
struct Discrete {
    std::vector<double> support;
    std::vector<double> weights;
};

using RewardDistribution = std::variant<Bernoulli, Discrete>;

struct ArmTypeSpec {
    double mean = 0.0;
    double probability = 0.0;
    RewardDistribution distribution = Bernoulli{};

    bool is_bernoulli() const { return std::holds_alternative<Bernoulli>(distribution); }
};

struct ReservoirSummary {
    double mu_star = 0.0;
    double gap = 0.0;
    double p_star = 0.0;
    std::vector<std::size_t> optimal_types;
};

using ArmId = std::uint64_t;

struct ArmInstance {
    ArmId arm_id = 0;
    std::size_t type_index = 0;
};

/// Checks the reservoir assumptions and returns (mu*, gap, p*, optimal types).
inline ReservoirSummary validate(const std::vector<ArmTypeSpec>& types) {
    if (types.empty()) fail(ErrorCode::EmptyReservoir, "reservoir has no arm types");

    double total = 0.0;
    for (std::size_t k = 0; k < types.size(); ++k) {
        const auto& t = types[k];
        const std::string where = "type " + std::to_string(k);
        if (!(t.mean >= 0.0 && t.mean <= 1.0))
            fail(ErrorCode::MeanOutOfRange, where + " mean " + std::to_string(t.mean) + " not in [0,1]");
        if (!(t.probability >= 0.0 && t.probability <= 1.0))
            fail(ErrorCode::ProbabilityNotSimplex, where + " probability outside [0,1]");
        total += t.probability;

        if (const auto* d = std::get_if<Discrete>(&t.distribution)) {
            if (d->support.empty() || d->support.size() != d->weights.size())
                fail(ErrorCode::InvalidDistribution, where + ": support and weights must be non-empty and equal length");
            double wsum = 0.0;
            double dmean = 0.0;
            for (std::size_t j = 0; j < d->support.size(); ++j) {
                if (!(d->support[j] >= 0.0 && d->support[j] <= 1.0))
                    fail(ErrorCode::MeanOutOfRange, where + ": support value outside [0,1]");
                if (!(d->weights[j] >= 0.0))
                    fail(ErrorCode::InvalidDistribution, where + ": negative weight");
                wsum += d->weights[j];
                dmean += d->support[j] * d->weights[j];
            }
            if (std::abs(wsum - 1.0) > kSpecTolerance)
                fail(ErrorCode::InvalidDistribution, where + ": weights do not sum to 1");
            if (std::abs(dmean - t.mean) > kSpecTolerance)
                fail(ErrorCode::InvalidDistribution, where + ": support mean differs from declared mean");
        }
    }
    if (std::abs(total - 1.0) > kSpecTolerance)
        fail(ErrorCode::ProbabilityNotSimplex, "type probabilities sum to " + std::to_string(total));

    ReservoirSummary s;
    s.mu_star = std::max_element(types.begin(), types.end(),
                                 [](const auto& a, const auto& b) { return a.mean < b.mean; })
                    ->mean;
    std::optional<double> second;
    for (std::size_t k = 0; k < types.size(); ++k) {
        if (types[k].mean == s.mu_star) {
            s.optimal_types.push_back(k);
            s.p_star += types[k].probability;
        } else if (!second || types[k].mean > *second) {
            second = types[k].mean;
        }
    }
    if (!second) fail(ErrorCode::ZeroGap, "all arm types share the same mean");
    s.gap = s.mu_star - *second;
    if (!(s.p_star > 0.0)) fail(ErrorCode::ParameterOutOfRange, "optimal types have zero probability");
    return s;
}

/// Typed arm reservoir. Immutable once constructed; construction validates.
class Reservoir {
public:
    explicit Reservoir(std::vector<ArmTypeSpec> types)
        : types_(std::move(types)), summary_(validate(types_)) {
        cumulative_.reserve(types_.size());
        double acc = 0.0;
        for (const auto& t : types_) cumulative_.push_back(acc += t.probability);
    }

    const std::vector<ArmTypeSpec>& types() const { return types_; }
    const ArmTypeSpec& type(std::size_t k) const { return types_.at(k); }
    std::size_t size() const { return types_.size(); }

    double mu_star() const { return summary_.mu_star; }
    double gap() const { return summary_.gap; }
    double p_star() const { return summary_.p_star; }
    const ReservoirSummary& summary() const { return summary_; }

    bool is_optimal(std::size_t k) const { return types_[k].mean == summary_.mu_star; }
    bool all_bernoulli() const {
        return std::all_of(types_.begin(), types_.end(), [](const auto& t) { return t.is_bernoulli(); });
    }

    /// Draws a type index with probability p_k; one stream value per call.
    std::size_t sample_type(CounterStream& rng) const {
        const double u = rng.uniform();
        for (std::size_t k = 0; k + 1 < cumulative_.size(); ++k)
            if (u < cumulative_[k] && types_[k].probability > 0.0) return k;
        // The final positive-probability type absorbs rounding in the cumulative sum.
        for (std::size_t k = types_.size(); k-- > 0;)
            if (types_[k].probability > 0.0) return k;
        return types_.size() - 1;
    }

    double draw_reward(std::size_t type_index, CounterStream& rng) const {
        const auto& t = types_[type_index];
        const double u = rng.uniform();
        if (t.is_bernoulli()) return u < t.mean ? 1.0 : 0.0;
        const auto& d = std::get<Discrete>(t.distribution);
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < d.support.size(); ++j) {
            acc += d.weights[j];
            if (u < acc) return d.support[j];
        }
        return d.support.back();
    }

private:
    std::vector<ArmTypeSpec> types_;
    ReservoirSummary summary_;
    std::vector<double> cumulative_;
};

/// Hands out fresh arms with strictly increasing ids, starting at 0.
class ArmSampler {
public:
    explicit ArmSampler(const Reservoir& reservoir) : reservoir_(&reservoir) {}

    ArmInstance sample_arm(CounterStream& rng) {
        return ArmInstance{next_id_++, reservoir_->sample_type(rng)};
    }

    double draw_reward(const ArmInstance& arm, CounterStream& rng) const {
        return reservoir_->draw_reward(arm.type_index, rng);
    }

    ArmId drawn() const { return next_id_; }

private:
    const Reservoir* reservoir_;
    ArmId next_id_ = 0;
};

// ---------------------------------------------------------------------------
// Lower-bound constructions
// ---------------------------------------------------------------------------

enum class HardInstanceKind { Cumulative, Bai, Adaptivity };

inline std::optional<HardInstanceKind> parse_hard_instance_kind(std::string_view name) {
    if (name == "cumulative") return HardInstanceKind::Cumulative;
    if (name == "bai") return HardInstanceKind::Bai;
    if (name == "adaptivity") return HardInstanceKind::Adaptivity;
    return std::nullopt;
}

inline std::string_view to_string(HardInstanceKind kind) {
    switch (kind) {
    case HardInstanceKind::Cumulative: return "cumulative";
    case HardInstanceKind::Bai: return "bai";
    case HardInstanceKind::Adaptivity: return "adaptivity";
    }
    return "unknown";
}

/// Bernoulli reservoir pairs from the lower-bound constructions. Variant 0 is
/// the reference problem, variant 1 its perturbation. Zero-probability types
/// are kept so type indices line up across both variants.
inline Reservoir hard_instance(HardInstanceKind kind, double delta, double p_star, int variant,
                               std::optional<double> q_star = std::nullopt) {
    if (!(delta > 0.0 && delta < 0.25))
        fail(ErrorCode::ParameterOutOfRange, "hard instances need delta in (0, 1/4)");
    if (!(p_star > 0.0 && p_star <= 0.25))
        fail(ErrorCode::ParameterOutOfRange, "hard instances need p_star in (0, 1/4]");
    if (variant != 0 && variant != 1) fail(ErrorCode::ParameterOutOfRange, "variant must be 0 or 1");

    auto ber = [](double mean, double prob) { return ArmTypeSpec{mean, prob, Bernoulli{}}; };
    const double half = 0.5;
    switch (kind) {
    case HardInstanceKind::Cumulative:
        return Reservoir({ber(half, p_star), ber(variant == 0 ? half - delta : half + delta, p_star),
                          ber(half - delta, 1.0 - 2.0 * p_star)});
    case HardInstanceKind::Bai:
        if (variant == 0) return Reservoir({ber(half, p_star), ber(half - delta, 1.0 - p_star)});
        return Reservoir({ber(half + delta, p_star), ber(half, p_star), ber(half - delta, 1.0 - 2.0 * p_star)});
    case HardInstanceKind::Adaptivity: {
        if (!q_star) fail(ErrorCode::ParameterOutOfRange, "adaptivity instance requires q_star");
        if (!(*q_star > 0.0 && *q_star + p_star < 1.0))
            fail(ErrorCode::ParameterOutOfRange, "q_star must satisfy 0 < q_star < 1 - p_star");
        if (variant == 0) return Reservoir({ber(half, p_star), ber(half - delta, 1.0 - p_star)});
        return Reservoir({ber(half + delta, *q_star), ber(half, p_star), ber(half - delta, 1.0 - *q_star - p_star)});
    }
    }
    fail(ErrorCode::ParameterOutOfRange, "unknown hard-instance kind");
}

/// Two-type Bernoulli reservoir {Ber(mu_star) w.p. p*, Ber(mu_star - delta) w.p. 1 - p*}.
inline Reservoir two_type_bernoulli(double mu_star, double delta, double p_star) {
    if (!(p_star > 0.0 && p_star <= 1.0)) fail(ErrorCode::ParameterOutOfRange, "p_star must be in (0,1]");
    if (!(delta > 0.0 && mu_star - delta >= 0.0))
        fail(ErrorCode::ParameterOutOfRange, "two-type reservoir needs 0 < delta <= mu_star");
    if (p_star == 1.0)
        return Reservoir({{mu_star, 1.0, Bernoulli{}}, {mu_star - delta, 0.0, Bernoulli{}}});
    return Reservoir({{mu_star, p_star, Bernoulli{}}, {mu_star - delta, 1.0 - p_star, Bernoulli{}}});
}

} // namespace rbandit
