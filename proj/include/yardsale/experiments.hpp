#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "yardsale/metrics.hpp"
#include "yardsale/model.hpp"
#include "yardsale/sampling.hpp"
#include "yardsale/stats.hpp"

namespace yardsale {

struct UniformInitial {
    bool operator==(const UniformInitial&) const = default;
};

/// Initial wealth: uniform over the agents, or an explicit vector (normalized on use).
using InitialWealth = std::variant<UniformInitial, std::vector<double>>;

inline constexpr double kDefaultCondensationEpsilon = 1e-6;
inline constexpr std::uint64_t kDefaultMaxSteps = 100'000'000;

struct TrajectoryConfig {
    ModelParams params;
    InitialWealth initial = UniformInitial{};
    std::uint64_t max_steps = kDefaultMaxSteps;
    /// Stop once max wealth >= 1 - epsilon. Empty disables the stopping rule.
    std::optional<double> condensation_epsilon = kDefaultCondensationEpsilon;
    std::uint64_t record_every = 1;
    StreamKey key;

    /// Throws DomainError (including an unreachable condensation target under taxation).
    void validate() const;

    bool operator==(const TrajectoryConfig&) const = default;
};

WealthState initial_state(const TrajectoryConfig& config);

enum class StopReason { condensed, max_steps };

const char* to_string(StopReason reason) noexcept;

struct TrajectoryRecord {
    std::vector<MetricsSnapshot> snapshots;
    StopReason stop_reason = StopReason::max_steps;
    std::optional<std::uint64_t> condensation_step;
    double cumulative_stake_sq = 0.0;
    std::optional<std::size_t> winner;
    std::uint64_t steps_run = 0;
    std::vector<double> final_wealth;

    bool operator==(const TrajectoryRecord&) const = default;
};

/// Runs one chain from the config's initial state. Snapshots are taken at step 0,
/// every record_every steps, and at the stopping step. The stake is accumulated
/// on every step.
TrajectoryRecord run_trajectory(const TrajectoryConfig& config);

struct EnsembleSummary {
    TrajectoryConfig config;  // template; key.master_seed holds the master seed
    std::size_t n_trajectories = 0;
    std::size_t n_condensed = 0;
    std::vector<std::uint64_t> win_counts;
    MeanEstimate condensation_step;   // over condensed trajectories
    MeanEstimate cumulative_stake_sq;  // over all trajectories
    /// Mean norm_sq on the grid 0, record_every, 2 record_every, ... Trajectories
    /// that stopped earlier contribute their final value.
    std::vector<std::uint64_t> series_steps;
    std::vector<double> mean_norm_sq;

    bool operator==(const EnsembleSummary&) const = default;
};

/// Trajectory k uses StreamKey{master_seed, k}. The summary is bitwise identical
/// for any thread count. threads == 0 picks default_thread_count().
EnsembleSummary run_ensemble(const TrajectoryConfig& config_template, std::size_t n_trajectories,
                             std::uint64_t master_seed, std::size_t threads = 0);

/// YARDSALE_THREADS when set to a positive integer, otherwise the hardware concurrency.
std::size_t default_thread_count();

/// Calls body(i) for i in [0, n) on up to `threads` workers. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace yardsale
