#include "yardsale/sampling.hpp"

#include <cmath>
#include <random>
#include <string>

#include "yardsale/errors.hpp"

namespace yardsale {

namespace {

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

struct FractionValidator {
    void operator()(const ConstantFraction& d) const {
        if (!in_open_unit(d.beta))
            throw DomainError("constant fraction beta must lie in (0,1), got " + std::to_string(d.beta));
    }
    void operator()(const UniformFraction& d) const {
        if (!(d.lo > 0.0 && d.lo < d.hi && d.hi < 1.0))
            throw DomainError("uniform fraction requires 0 < lo < hi < 1");
    }
    void operator()(const BetaFraction& d) const {
        if (!(d.a > 0.0 && d.b > 0.0 && std::isfinite(d.a) && std::isfinite(d.b)))
            throw DomainError("beta fraction requires a > 0 and b > 0");
    }
};

}  // namespace

void validate(const FractionDistribution& dist) { std::visit(FractionValidator{}, dist); }

double mean_fraction(const FractionDistribution& dist) {
    struct {
        double operator()(const ConstantFraction& d) const { return d.beta; }
        double operator()(const UniformFraction& d) const { return 0.5 * (d.lo + d.hi); }
        double operator()(const BetaFraction& d) const { return d.a / (d.a + d.b); }
    } mean;
    return std::visit(mean, dist);
}

Stream::Stream(StreamKey key) noexcept
    : key_(key),
      philox_key_{static_cast<std::uint32_t>(key.master_seed),
                  static_cast<std::uint32_t>(key.master_seed >> 32)} {}

void Stream::refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(key_.trajectory_index),
                                  static_cast<std::uint32_t>(key_.trajectory_index >> 32)};
    const auto out = Philox4x32::block(ctr, philox_key_);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++block_;
    cursor_ = 0;
}

std::uint64_t Stream::below(std::uint64_t bound) noexcept {
    __extension__ typedef unsigned __int128 u128;
    u128 m = static_cast<u128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

Stream derive_stream(StreamKey key) noexcept { return Stream(key); }

std::pair<std::size_t, std::size_t> draw_pair(Stream& stream, std::size_t n_agents) {
    if (n_agents < 2) throw DomainError("pair selection needs at least 2 agents");
    const std::uint64_t others = n_agents - 1;
    const std::uint64_t r = stream.below(n_agents * others);
    const auto first = static_cast<std::size_t>(r / others);
    auto second = static_cast<std::size_t>(r % others);
    if (second >= first) ++second;
    return {first, second};
}

double draw_fraction(Stream& stream, const FractionDistribution& dist) {
    struct Sampler {
        Stream& s;
        double operator()(const ConstantFraction& d) const { return d.beta; }
        double operator()(const UniformFraction& d) const {
            return d.lo + (d.hi - d.lo) * s.uniform_open01();
        }
        double operator()(const BetaFraction& d) const {
            std::gamma_distribution<double> ga(d.a, 1.0);
            std::gamma_distribution<double> gb(d.b, 1.0);
            for (;;) {
                const double x = ga(s);
                const double y = gb(s);
                const double v = x / (x + y);
                if (in_open_unit(v)) return v;
            }
        }
    };
    validate(dist);
    return std::visit(Sampler{stream}, dist);
}

void validate_delta(double delta) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw DomainError("bias delta must lie in [0, 0.5), got " + std::to_string(delta));
}

bool draw_richer_wins(Stream& stream, double delta) {
    validate_delta(delta);
    return stream.uniform01() < 0.5 + delta;
}

}  // namespace yardsale
