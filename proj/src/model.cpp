#include "yardsale/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "yardsale/errors.hpp"

namespace yardsale {

namespace {

void check_entries(const std::vector<double>& wealth) {
    if (wealth.empty()) throw InvalidState(InvalidState::Reason::empty, "wealth vector is empty");
    for (std::size_t i = 0; i < wealth.size(); ++i) {
        if (!std::isfinite(wealth[i]))
            throw InvalidState(InvalidState::Reason::non_finite,
                               "wealth of agent " + std::to_string(i) + " is not finite");
        if (wealth[i] < 0.0)
            throw InvalidState(InvalidState::Reason::negative_entry,
                               "wealth of agent " + std::to_string(i) + " is negative");
    }
}

double plain_sum(const std::vector<double>& wealth) {
    double sum = 0.0;
    for (double x : wealth) sum += x;
    return sum;
}

}  // namespace

WealthState WealthState::adopt(std::vector<double> wealth) {
    check_entries(wealth);
    const double sum = plain_sum(wealth);
    if (!(std::abs(sum - 1.0) <= kDriftTolerance))
        throw InvalidState(InvalidState::Reason::unnormalized,
                           "wealth total drifted from 1: " + std::to_string(sum));
    return WealthState(std::move(wealth));
}

WealthState make_state(std::vector<double> raw) {
    check_entries(raw);
    const double sum = plain_sum(raw);
    if (!(sum > 0.0)) throw InvalidState(InvalidState::Reason::zero_total, "total wealth is zero");
    if (!std::isfinite(sum)) throw InvalidState(InvalidState::Reason::non_finite, "total wealth overflows");
    if (sum != 1.0)
        for (double& x : raw) x /= sum;
    return WealthState(std::move(raw));
}

WealthState uniform_state(std::size_t n_agents) {
    if (n_agents == 0) throw InvalidState(InvalidState::Reason::empty, "uniform state needs at least one agent");
    return make_state(std::vector<double>(n_agents, 1.0));
}

void validate_chi(double chi) {
    if (!(chi > 0.0 && chi < 1.0))
        throw DomainError("tax rate chi must lie in (0,1), got " + std::to_string(chi));
}

void ModelParams::validate() const {
    if (n_agents < 2) throw DomainError("n_agents must be at least 2");
    validate_delta(delta);
    yardsale::validate(fraction);
    if (risk_lambda) {
        if (risk_lambda->size() != n_agents)
            throw DomainError("lambda has " + std::to_string(risk_lambda->size()) + " entries, expected " +
                              std::to_string(n_agents));
        for (double l : *risk_lambda)
            if (!(l > 0.0 && l < 1.0)) throw DomainError("every lambda must lie in (0,1)");
    }
    if (tax_chi) validate_chi(*tax_chi);
}

Roles resolve_roles(std::span<const double> wealth, const TradeDraw& draw) {
    if (draw.agent_a >= wealth.size() || draw.agent_b >= wealth.size())
        throw std::out_of_range("trade draw names an agent outside the state");
    if (draw.agent_a == draw.agent_b) throw DomainError("trade draw pairs an agent with itself");
    const std::size_t lo = std::min(draw.agent_a, draw.agent_b);
    const std::size_t hi = std::max(draw.agent_a, draw.agent_b);
    // Ties resolve to the smaller index as the poorer agent.
    if (wealth[hi] < wealth[lo]) return {hi, lo};
    return {lo, hi};
}

StepOutcome trade_in_place(std::span<double> wealth, const TradeDraw& draw,
                           std::span<const double> risk_lambda) {
    const Roles roles = resolve_roles(wealth, draw);
    StepOutcome out;
    out.poorer = roles.poorer;
    out.richer = roles.richer;
    out.poorer_before = wealth[roles.poorer];
    out.richer_before = wealth[roles.richer];
    out.fraction = draw.fraction;
    out.stake = draw.fraction * out.poorer_before;
    const double transfer = risk_lambda.empty() ? out.stake : out.stake * risk_lambda[roles.poorer];
    out.transfer_signed = draw.richer_wins ? -transfer : transfer;
    wealth[roles.poorer] = out.poorer_before + out.transfer_signed;
    wealth[roles.richer] = out.richer_before - out.transfer_signed;
    return out;
}

void tax_in_place(std::span<double> wealth, double chi) {
    const double keep = 1.0 - chi;
    const double share = chi / static_cast<double>(wealth.size());
    for (double& x : wealth) x = keep * x + share;
}

std::pair<WealthState, StepOutcome> apply_trade(const WealthState& state, const TradeDraw& draw,
                                                const ModelParams& params) {
    if (!(draw.fraction > 0.0 && draw.fraction < 1.0)) throw DomainError("trade fraction must lie in (0,1)");
    std::vector<double> next = state.vector();
    std::span<const double> lambda;
    if (params.risk_lambda) {
        if (params.risk_lambda->size() != next.size()) throw DomainError("lambda length does not match state");
        lambda = *params.risk_lambda;
    }
    const StepOutcome outcome = trade_in_place(next, draw, lambda);
    return {WealthState::adopt(std::move(next)), outcome};
}

WealthState apply_taxation(const WealthState& state, double chi) {
    validate_chi(chi);
    std::vector<double> next = state.vector();
    tax_in_place(next, chi);
    return WealthState::adopt(std::move(next));
}

std::pair<WealthState, StepOutcome> step(const WealthState& state, const TradeDraw& draw,
                                         const ModelParams& params) {
    auto [traded, outcome] = apply_trade(state, draw, params);
    if (!params.tax_chi) return {std::move(traded), outcome};
    return {apply_taxation(traded, *params.tax_chi), outcome};
}

TradeDraw draw_trade(Stream& stream, const ModelParams& params) {
    TradeDraw draw;
    std::tie(draw.agent_a, draw.agent_b) = draw_pair(stream, params.n_agents);
    draw.fraction = draw_fraction(stream, params.fraction);
    draw.richer_wins = draw_richer_wins(stream, params.delta);
    return draw;
}

}  // namespace yardsale
