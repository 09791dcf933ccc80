#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "yardsale/model.hpp"
#include "yardsale/sampling.hpp"

namespace yardsale {

/// One running chain: owns its wealth buffer and its random stream.
/// Strictly sequential; one Simulator per trajectory.
class Simulator {
public:
    /// Throws DomainError if params are invalid or the initial state has the wrong length.
    Simulator(ModelParams params, const WealthState& initial, StreamKey key);

    /// Draws and applies one trade (then the tax, if any).
    StepOutcome advance();

    std::uint64_t steps() const noexcept { return steps_; }
    std::span<const double> wealth() const noexcept { return wealth_; }
    WealthState state() const { return WealthState::adopt(wealth_); }
    const ModelParams& params() const noexcept { return params_; }

private:
    ModelParams params_;
    std::vector<double> wealth_;
    std::vector<double> lambda_;
    Stream stream_;
    std::uint64_t steps_ = 0;
};

}  // namespace yardsale
