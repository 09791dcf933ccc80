#include "yardsale/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "yardsale/errors.hpp"
#include "yardsale/sampling.hpp"

namespace yardsale {

double norm_sq(std::span<const double> wealth) noexcept {
    double sum = 0.0;
    for (double x : wealth) sum += x * x;
    return sum;
}

double max_wealth(std::span<const double> wealth) noexcept {
    return wealth.empty() ? 0.0 : *std::max_element(wealth.begin(), wealth.end());
}

std::size_t argmax(std::span<const double> wealth) noexcept {
    return static_cast<std::size_t>(std::max_element(wealth.begin(), wealth.end()) - wealth.begin());
}

double min_wealth(std::span<const double> wealth) noexcept {
    return wealth.empty() ? 0.0 : *std::min_element(wealth.begin(), wealth.end());
}

double total_wealth(std::span<const double> wealth) noexcept {
    double sum = 0.0;
    for (double x : wealth) sum += x;
    return sum;
}

double ipr(std::span<const double> wealth) noexcept { return 1.0 / norm_sq(wealth); }

double gini(std::span<const double> wealth) {
    const std::size_t n = wealth.size();
    if (n == 0) return 0.0;
    std::vector<double> sorted(wealth.begin(), wealth.end());
    std::sort(sorted.begin(), sorted.end());
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rank_weight = 2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0;
        weighted += rank_weight * sorted[i];
        total += sorted[i];
    }
    if (total <= 0.0) return 0.0;
    return std::max(0.0, weighted / (static_cast<double>(n) * total));
}

MetricsSnapshot snapshot(std::span<const double> wealth, std::uint64_t step, double last_stake) {
    MetricsSnapshot s;
    s.step = step;
    s.max_wealth = max_wealth(wealth);
    s.norm_sq = norm_sq(wealth);
    s.ipr = 1.0 / s.norm_sq;
    s.gini = gini(wealth);
    s.total = total_wealth(wealth);
    s.last_stake = last_stake;
    return s;
}

double expected_norm_increment(std::span<const double> wealth, std::size_t poorer, std::size_t richer,
                               double fraction, double delta) {
    if (poorer >= wealth.size() || richer >= wealth.size())
        throw std::out_of_range("agent index outside the state");
    if (poorer == richer) throw DomainError("poorer and richer must be distinct agents");
    validate_delta(delta);
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("fraction must lie in (0,1)");
    const double x_poor = wealth[poorer];
    const double x_rich = wealth[richer];
    if (x_poor > x_rich) throw DomainError("role order violated: poorer agent holds more wealth");
    const double stake = fraction * x_poor;
    return 2.0 * stake * stake + 4.0 * delta * stake * (x_rich - x_poor);
}

}  // namespace yardsale
