#pragma once
/*
Counter-based random streams.

Every random number in a simulation is a pure function of
(key, stream_id, draw_counter), computed by the Philox4x32-10 block cipher
(Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC'11).
A trial's results therefore never depend on which thread ran it or in what
order trials were scheduled.

  key           64-bit seed (master seed or a derived trial seed)
  counter word  (draw_counter_lo, draw_counter_hi, stream_lo, stream_hi)
*/

#include <array>
#include <cstdint>
#include <limits>

namespace rbandit {

struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// A reproducible random stream keyed on (seed, stream_id). Each call
/// consumes one counter value; copying a stream forks it.
class CounterStream {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() { return at(counter_++); }

    /// Random value at an explicit counter position; does not advance.
    constexpr result_type at(std::uint64_t counter) const {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(counter),
                                      static_cast<std::uint32_t>(counter >> 32),
                                      static_cast<std::uint32_t>(stream_id_),
                                      static_cast<std::uint32_t>(stream_id_ >> 32)};
        const auto out = Philox4x32::block(ctr, key_);
        return (std::uint64_t{out[1]} << 32) | out[0];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    constexpr std::uint64_t draws() const { return counter_; }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
};

/// Seed of trial `trial_index` under `master_seed`. Stream id 1 is reserved
/// for seed derivation so it never collides with an episode stream (id 0).
constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return CounterStream(master_seed, 1).at(trial_index);
}

} // namespace rbandit
