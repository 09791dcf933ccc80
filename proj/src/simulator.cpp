#include "yardsale/simulator.hpp"

#include <string>
#include <utility>

#include "yardsale/errors.hpp"

namespace yardsale {

Simulator::Simulator(ModelParams params, const WealthState& initial, StreamKey key)
    : params_(std::move(params)), wealth_(initial.vector()), stream_(key) {
    params_.validate();
    if (wealth_.size() != params_.n_agents)
        throw DomainError("initial state has " + std::to_string(wealth_.size()) + " agents, expected " +
                          std::to_string(params_.n_agents));
    if (params_.risk_lambda) lambda_ = *params_.risk_lambda;
}

StepOutcome Simulator::advance() {
    const TradeDraw draw = draw_trade(stream_, params_);
    const StepOutcome outcome = trade_in_place(wealth_, draw, lambda_);
    if (params_.tax_chi) tax_in_place(wealth_, *params_.tax_chi);
    ++steps_;
    return outcome;
}

}  // namespace yardsale
