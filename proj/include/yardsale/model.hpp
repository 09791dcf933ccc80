#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "yardsale/sampling.hpp"

namespace yardsale {

/// Nonnegative wealth vector with unit total.
class WealthState {
public:
    /// Tolerance on |sum - 1| accepted by adopt(); covers rounding drift over long runs.
    static constexpr double kDriftTolerance = 1e-9;

    /// Wraps a vector that is already a valid state (e.g. the working buffer of a
    /// running chain). Checks nonnegativity and |sum - 1| <= kDriftTolerance but
    /// never renormalizes.
    static WealthState adopt(std::vector<double> wealth);

    std::size_t size() const noexcept { return wealth_.size(); }
    double operator[](std::size_t i) const { return wealth_[i]; }
    std::span<const double> values() const noexcept { return wealth_; }
    operator std::span<const double>() const noexcept { return wealth_; }
    const std::vector<double>& vector() const noexcept { return wealth_; }

    bool operator==(const WealthState&) const = default;

private:
    explicit WealthState(std::vector<double> wealth) : wealth_(std::move(wealth)) {}
    friend WealthState make_state(std::vector<double> raw);

    std::vector<double> wealth_;
};

/// Normalizes `raw` to unit total. Throws InvalidState (empty, negative_entry,
/// zero_total, non_finite).
WealthState make_state(std::vector<double> raw);

WealthState uniform_state(std::size_t n_agents);

struct ModelParams {
    std::size_t n_agents = 2;
    double delta = 0.0;
    FractionDistribution fraction = ConstantFraction{0.1};
    std::optional<std::vector<double>> risk_lambda;
    std::optional<double> tax_chi;

    double win_probability() const noexcept { return 0.5 + delta; }
    bool is_plain() const noexcept { return !risk_lambda && !tax_chi; }

    /// Throws DomainError on the first violated invariant.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

void validate_chi(double chi);

struct TradeDraw {
    std::size_t agent_a = 0;
    std::size_t agent_b = 1;
    double fraction = 0.5;
    bool richer_wins = false;
};

struct StepOutcome {
    double fraction = 0.0;
    double stake = 0.0;            // fraction * pre-step wealth of the poorer agent
    std::size_t poorer = 0;
    std::size_t richer = 0;
    double transfer_signed = 0.0;  // positive when the poorer agent gains
    double poorer_before = 0.0;
    double richer_before = 0.0;
};

struct Roles {
    std::size_t poorer;
    std::size_t richer;
    bool operator==(const Roles&) const = default;
};

/// Orders the drawn pair by wealth; on a tie the smaller index is the poorer.
/// Throws std::out_of_range on an invalid index, DomainError if a == b.
Roles resolve_roles(std::span<const double> wealth, const TradeDraw& draw);

/// Trade on a mutable wealth buffer. Only the two drawn entries are written.
/// `risk_lambda` is empty for the plain model.
StepOutcome trade_in_place(std::span<double> wealth, const TradeDraw& draw,
                           std::span<const double> risk_lambda = {});

/// x <- (1 - chi) x + chi / N, in place.
void tax_in_place(std::span<double> wealth, double chi);

std::pair<WealthState, StepOutcome> apply_trade(const WealthState& state, const TradeDraw& draw,
                                                const ModelParams& params);

WealthState apply_taxation(const WealthState& state, double chi);

/// Trade, then flat tax when params.tax_chi is set.
std::pair<WealthState, StepOutcome> step(const WealthState& state, const TradeDraw& draw,
                                         const ModelParams& params);

/// Pair, fraction and coin for one step, drawn in that order.
TradeDraw draw_trade(Stream& stream, const ModelParams& params);

}  // namespace yardsale
