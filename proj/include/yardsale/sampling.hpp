#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <variant>

#include "yardsale/philox.hpp"

namespace yardsale {

// ---------------------------------------------------------------------------
// Fraction law for the traded share B of the poorer agent's wealth.
// ---------------------------------------------------------------------------

struct ConstantFraction {
    double beta = 0.1;
    bool operator==(const ConstantFraction&) const = default;
};

struct UniformFraction {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const UniformFraction&) const = default;
};

/// Beta(a, b); draws landing exactly on 0 or 1 are redrawn.
struct BetaFraction {
    double a = 1.0;
    double b = 1.0;
    bool operator==(const BetaFraction&) const = default;
};

using FractionDistribution = std::variant<ConstantFraction, UniformFraction, BetaFraction>;

/// Throws DomainError unless every draw of `dist` is guaranteed to lie in (0,1).
void validate(const FractionDistribution& dist);

/// Mean of the fraction law (used by reports, not by the sampler).
double mean_fraction(const FractionDistribution& dist);

// ---------------------------------------------------------------------------
// Streams
// ---------------------------------------------------------------------------

struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_index = 0;
    bool operator==(const StreamKey&) const = default;
};

/// Counter-based stream: Philox keyed by the master seed, with the trajectory
/// index in the upper half of the counter and a block index in the lower half.
/// Each trajectory therefore owns a disjoint slice of 2^64 blocks.
///
/// Satisfies UniformRandomBitGenerator. Single owner; copy to fork.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(StreamKey key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (cursor_ == 2) refill();
        return buffer_[cursor_++];
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1p-53; }

    /// Uniform on the open interval (0,1).
    double uniform_open01() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1p-53;
    }

    /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject). bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    StreamKey key() const noexcept { return key_; }
    std::uint64_t blocks_consumed() const noexcept { return block_; }

private:
    void refill() noexcept;

    StreamKey key_;
    Philox4x32::Key philox_key_;
    std::uint64_t block_ = 0;
    std::uint64_t buffer_[2] = {0, 0};
    int cursor_ = 2;
};

Stream derive_stream(StreamKey key) noexcept;

/// Ordered pair (i, j), i != j, uniform over the N(N-1) ordered pairs.
std::pair<std::size_t, std::size_t> draw_pair(Stream& stream, std::size_t n_agents);

/// A fraction strictly inside (0,1). Constant returns beta exactly without consuming randomness.
double draw_fraction(Stream& stream, const FractionDistribution& dist);

/// True with probability 1/2 + delta, delta in [0, 1/2).
bool draw_richer_wins(Stream& stream, double delta);

void validate_delta(double delta);

}  // namespace yardsale
