#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace yardsale {

struct MetricsSnapshot {
    std::uint64_t step = 0;
    double max_wealth = 0.0;
    double norm_sq = 0.0;
    double ipr = 0.0;
    double gini = 0.0;
    double total = 0.0;
    double last_stake = 0.0;

    bool operator==(const MetricsSnapshot&) const = default;
};

double norm_sq(std::span<const double> wealth) noexcept;
double max_wealth(std::span<const double> wealth) noexcept;
std::size_t argmax(std::span<const double> wealth) noexcept;
double min_wealth(std::span<const double> wealth) noexcept;
double total_wealth(std::span<const double> wealth) noexcept;

/// Inverse participation ratio 1 / ||x||^2.
double ipr(std::span<const double> wealth) noexcept;

/// Gini index sum_ij |x_i - x_j| / (2 N sum_k x_k), via the sorted weighted sum
/// sum_i (2i - N - 1) x_(i) / (N sum_k x_k). O(N log N).
double gini(std::span<const double> wealth);

MetricsSnapshot snapshot(std::span<const double> wealth, std::uint64_t step, double last_stake);

/// Conditional expectation of ||X_n||^2 - ||X_{n-1}||^2 given the pair, the
/// fraction and the pre-step state, for the plain model with bias delta:
///     2 w^2 + 4 delta w (x_richer - x_poorer),   w = fraction * x_poorer.
/// Throws DomainError when x_poorer > x_richer or delta/fraction are out of range.
double expected_norm_increment(std::span<const double> wealth, std::size_t poorer,
                               std::size_t richer, double fraction, double delta);

}  // namespace yardsale
