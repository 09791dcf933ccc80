#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "yardsale/experiments.hpp"
#include "yardsale/stats.hpp"

namespace yardsale {

// ---------------------------------------------------------------------------
// Win law for the unbiased model: P(agent i ends up with everything) = X_0^i.
// ---------------------------------------------------------------------------

struct WinEstimate {
    std::size_t agent = 0;
    double initial_share = 0.0;
    double estimate = 0.0;
    /// 3-sigma interval around the estimate, sigma = sqrt(p_hat (1 - p_hat) / n).
    double ci_low = 0.0;
    double ci_high = 0.0;
    /// z of the estimate against the initial share, using the binomial sigma at that share.
    double z = 0.0;
    /// |z| <= 3; agents failing this are flagged.
    bool consistent = true;
};

/// Throws DomainError when the ensemble is biased (delta > 0) or when some
/// trajectory did not condense.
std::vector<WinEstimate> estimate_win_probabilities(const EnsembleSummary& summary);

// ---------------------------------------------------------------------------
// One-step increment of ||X||^2 against 2 w^2, step by step across an ensemble.
// ---------------------------------------------------------------------------

struct IncrementStepStats {
    std::uint64_t step = 0;
    double mean_increment = 0.0;        // mean of ||X_n||^2 - ||X_{n-1}||^2
    double mean_twice_stake_sq = 0.0;   // mean of 2 w_n^2
    MeanEstimate gap;                   // increment - 2 w^2
    MeanEstimate bias_term;             // 4 delta w (x_richer - x_poorer)
    MeanEstimate residual;              // increment - expected_norm_increment
    double gap_z = 0.0;                 // against 0
    double residual_z = 0.0;            // against 0
};

struct IncrementBoundReport {
    double delta = 0.0;
    std::size_t n_trajectories = 0;
    std::uint64_t n_steps = 0;
    std::vector<IncrementStepStats> steps;
    // Per-trajectory sums over all steps.
    MeanEstimate total_gap;
    MeanEstimate total_bias_term;
    MeanEstimate total_residual;
    double total_gap_z = 0.0;
    double total_residual_z = 0.0;
    double max_abs_gap_z = 0.0;
    double max_abs_residual_z = 0.0;
    /// Per-step threshold keeping the familywise level of a single 3-sigma test.
    double per_step_z_threshold = 0.0;
    /// delta == 0: the gap is consistent with 0 overall and at every step.
    /// delta > 0: the summed gap is positive (z > 3).
    /// Always: the residual against the closed form is consistent with 0 overall
    /// and at every step.
    bool passed = false;
};

/// Runs n_trajectories plain-model chains for n_steps each (no stopping rule).
/// Throws DomainError for the risk-tolerance or taxation variants.
IncrementBoundReport verify_increment_bound(const TrajectoryConfig& config, std::uint64_t n_steps,
                                            std::size_t n_trajectories, std::size_t threads = 0);

// ---------------------------------------------------------------------------
// Sum over n of w_n^2 against (1 - ||X_0||^2) / 2.
// ---------------------------------------------------------------------------

struct StakeSummabilityReport {
    std::uint64_t horizon = 0;
    std::size_t n_trajectories = 0;
    double initial_norm_sq = 0.0;
    double bound = 0.0;          // (1 - ||X_0||^2) / 2
    double coarse_bound = 0.5;
    /// Ensemble mean of the running sum at each checkpoint (powers of ten and the horizon).
    std::vector<std::uint64_t> checkpoints;
    std::vector<MeanEstimate> cumulative_stake_sq;
    MeanEstimate at_horizon;
    /// Every trajectory's running sum was nondecreasing across checkpoints.
    bool monotone = true;
    /// at_horizon.mean <= bound + 3 SE.
    bool passed = false;
};

StakeSummabilityReport verify_stake_summability(const TrajectoryConfig& config, std::uint64_t horizon,
                                                std::size_t n_trajectories, std::size_t threads = 0);

// ---------------------------------------------------------------------------
// E(X_n^i) = X_0^i for the unbiased model.
// ---------------------------------------------------------------------------

struct MartingaleCheck {
    std::uint64_t step = 0;
    std::size_t agent = 0;
    double initial_share = 0.0;
    MeanEstimate mean_wealth;
    double z = 0.0;
    bool consistent = true;  // |z| <= 3
};

struct MartingaleReport {
    std::size_t n_trajectories = 0;
    std::vector<MartingaleCheck> checks;
    bool passed = false;
};

/// Runs chains without the stopping rule up to the largest checkpoint.
MartingaleReport verify_martingale(const TrajectoryConfig& config, std::vector<std::uint64_t> checkpoints,
                                   std::size_t n_trajectories, std::size_t threads = 0);

// ---------------------------------------------------------------------------
// Condensation times over a parameter grid.
// ---------------------------------------------------------------------------

struct GridPoint {
    std::size_t n_agents = 2;
    double delta = 0.0;
    FractionDistribution fraction = ConstantFraction{0.1};
    double epsilon = kDefaultCondensationEpsilon;
    InitialWealth initial = UniformInitial{};
};

struct CondensationTimeRow {
    GridPoint point;
    std::size_t n_trajectories = 0;
    std::size_t n_condensed = 0;
    MeanEstimate mean_steps;  // over condensed trajectories
    MedianEstimate median_steps;
};

/// Rows that differ only in delta, compared in increasing delta.
struct MonotonicityNote {
    std::size_t lower_delta_row = 0;
    std::size_t higher_delta_row = 0;
    /// Higher-delta mean <= lower-delta mean + 3 sqrt(se_lo^2 + se_hi^2).
    bool not_slower = true;
};

struct CondensationTimeTable {
    std::vector<CondensationTimeRow> rows;
    std::vector<MonotonicityNote> diagnostics;
};

/// Each grid point replaces n_agents, delta, fraction, epsilon and initial wealth of `base`.
/// Throws DomainError if `base` has taxation.
CondensationTimeTable condensation_time_study(const TrajectoryConfig& base, const std::vector<GridPoint>& grid,
                                              std::size_t n_trajectories, std::uint64_t master_seed,
                                              std::size_t threads = 0);

}  // namespace yardsale
