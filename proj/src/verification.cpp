#include "yardsale/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "yardsale/errors.hpp"
#include "yardsale/metrics.hpp"
#include "yardsale/simulator.hpp"

namespace yardsale {

namespace {

constexpr std::size_t kChunkSize = 32;
constexpr double kExactTol = 1e-15;

std::size_t resolve_threads(std::size_t threads) { return threads == 0 ? default_thread_count() : threads; }

std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

void require_plain(const TrajectoryConfig& config, const char* what) {
    if (!config.params.is_plain())
        throw DomainError(std::string(what) + " applies to the plain model only (no lambda, no tax)");
}

TrajectoryConfig with_key(const TrajectoryConfig& config, std::uint64_t index) {
    TrajectoryConfig c = config;
    c.key = StreamKey{config.key.master_seed, index};
    return c;
}

}  // namespace

std::vector<WinEstimate> estimate_win_probabilities(const EnsembleSummary& summary) {
    if (summary.config.params.delta != 0.0)
        throw DomainError("win probabilities equal initial shares only for the unbiased model (p = 1/2)");
    if (summary.n_trajectories == 0) throw DomainError("empty ensemble");
    if (summary.n_condensed != summary.n_trajectories)
        throw DomainError(std::to_string(summary.n_trajectories - summary.n_condensed) + " of " +
                          std::to_string(summary.n_trajectories) +
                          " trajectories did not condense; raise max_steps");
    const WealthState start = initial_state(summary.config);
    const double n = static_cast<double>(summary.n_trajectories);
    std::vector<WinEstimate> out;
    out.reserve(start.size());
    for (std::size_t i = 0; i < start.size(); ++i) {
        WinEstimate e;
        e.agent = i;
        e.initial_share = start[i];
        e.estimate = static_cast<double>(summary.win_counts.at(i)) / n;
        const double se_hat = std::sqrt(e.estimate * (1.0 - e.estimate) / n);
        e.ci_low = e.estimate - kSigmaLevel * se_hat;
        e.ci_high = e.estimate + kSigmaLevel * se_hat;
        const double se_null = std::sqrt(e.initial_share * (1.0 - e.initial_share) / n);
        e.z = z_score(e.estimate, e.initial_share, se_null, kExactTol);
        e.consistent = std::abs(e.z) <= kSigmaLevel;
        out.push_back(e);
    }
    return out;
}

IncrementBoundReport verify_increment_bound(const TrajectoryConfig& config, std::uint64_t n_steps,
                                            std::size_t n_trajectories, std::size_t threads) {
    require_plain(config, "the increment bound check");
    config.params.validate();
    if (n_steps < 1 || n_trajectories < 2) throw DomainError("need n_steps >= 1 and n_trajectories >= 2");
    const double delta = config.params.delta;
    const WealthState start = initial_state(config);

    // Per step: sum and sum of squares of the increment, 2w^2, gap, bias term, residual.
    enum Field { kInc, kTwice, kGap, kGapSq, kBias, kBiasSq, kResid, kResidSq, kFields };
    struct ChunkSums {
        std::vector<std::array<double, kFields>> per_step;
    };
    const std::size_t n_chunks = chunk_count(n_trajectories);
    std::vector<ChunkSums> chunks(n_chunks);
    std::vector<double> total_gap(n_trajectories), total_bias(n_trajectories), total_resid(n_trajectories);

    parallel_for(n_chunks, resolve_threads(threads), [&](std::size_t chunk) {
        auto& sums = chunks[chunk].per_step;
        sums.assign(n_steps, {});
        const std::size_t end = std::min(n_trajectories, (chunk + 1) * kChunkSize);
        for (std::size_t k = chunk * kChunkSize; k < end; ++k) {
            Simulator sim(config.params, start, StreamKey{config.key.master_seed, k});
            double g_sum = 0.0, c_sum = 0.0, r_sum = 0.0;
            for (std::uint64_t n = 0; n < n_steps; ++n) {
                const StepOutcome out = sim.advance();
                const auto w = sim.wealth();
                const double p_after = w[out.poorer];
                const double r_after = w[out.richer];
                const double increment = (p_after * p_after - out.poorer_before * out.poorer_before) +
                                         (r_after * r_after - out.richer_before * out.richer_before);
                const double twice = 2.0 * out.stake * out.stake;
                const double bias = 4.0 * delta * out.stake * (out.richer_before - out.poorer_before);
                const std::array<double, 2> pair{out.poorer_before, out.richer_before};
                const double expected = expected_norm_increment(pair, 0, 1, out.fraction, delta);
                const double gap = increment - twice;
                const double resid = increment - expected;
                auto& s = sums[n];
                s[kInc] += increment;
                s[kTwice] += twice;
                s[kGap] += gap;
                s[kGapSq] += gap * gap;
                s[kBias] += bias;
                s[kBiasSq] += bias * bias;
                s[kResid] += resid;
                s[kResidSq] += resid * resid;
                g_sum += gap;
                c_sum += bias;
                r_sum += resid;
            }
            total_gap[k] = g_sum;
            total_bias[k] = c_sum;
            total_resid[k] = r_sum;
        }
    });

    std::vector<std::array<double, kFields>> sums(n_steps, std::array<double, kFields>{});
    for (const auto& c : chunks)
        for (std::uint64_t n = 0; n < n_steps; ++n)
            for (int f = 0; f < kFields; ++f) sums[n][f] += c.per_step[n][f];

    IncrementBoundReport report;
    report.delta = delta;
    report.n_trajectories = n_trajectories;
    report.n_steps = n_steps;
    report.per_step_z_threshold = familywise_z_threshold(n_steps);
    const double count = static_cast<double>(n_trajectories);
    report.steps.reserve(n_steps);
    for (std::uint64_t n = 0; n < n_steps; ++n) {
        const auto& s = sums[n];
        IncrementStepStats st;
        st.step = n + 1;
        st.mean_increment = s[kInc] / count;
        st.mean_twice_stake_sq = s[kTwice] / count;
        st.gap = estimate_mean_from_sums(n_trajectories, s[kGap], s[kGapSq]);
        st.bias_term = estimate_mean_from_sums(n_trajectories, s[kBias], s[kBiasSq]);
        st.residual = estimate_mean_from_sums(n_trajectories, s[kResid], s[kResidSq]);
        st.gap_z = z_score(st.gap.mean, 0.0, st.gap.std_error, kExactTol);
        st.residual_z = z_score(st.residual.mean, 0.0, st.residual.std_error, kExactTol);
        report.max_abs_gap_z = std::max(report.max_abs_gap_z, std::abs(st.gap_z));
        report.max_abs_residual_z = std::max(report.max_abs_residual_z, std::abs(st.residual_z));
        report.steps.push_back(st);
    }
    report.total_gap = estimate_mean(total_gap);
    report.total_bias_term = estimate_mean(total_bias);
    report.total_residual = estimate_mean(total_resid);
    report.total_gap_z = z_score(report.total_gap.mean, 0.0, report.total_gap.std_error, kExactTol);
    report.total_residual_z = z_score(report.total_residual.mean, 0.0, report.total_residual.std_error, kExactTol);

    const bool residual_ok = std::abs(report.total_residual_z) <= kSigmaLevel &&
                             report.max_abs_residual_z <= report.per_step_z_threshold;
    const bool gap_ok = delta == 0.0 ? std::abs(report.total_gap_z) <= kSigmaLevel &&
                                           report.max_abs_gap_z <= report.per_step_z_threshold
                                     : report.total_gap_z > kSigmaLevel;
    report.passed = residual_ok && gap_ok;
    return report;
}

StakeSummabilityReport verify_stake_summability(const TrajectoryConfig& config, std::uint64_t horizon,
                                                std::size_t n_trajectories, std::size_t threads) {
    require_plain(config, "the stake summability check");
    config.params.validate();
    if (horizon < 1 || n_trajectories < 1) throw DomainError("need horizon >= 1 and n_trajectories >= 1");
    const WealthState start = initial_state(config);

    StakeSummabilityReport report;
    report.horizon = horizon;
    report.n_trajectories = n_trajectories;
    report.initial_norm_sq = norm_sq(start);
    report.bound = 0.5 * (1.0 - report.initial_norm_sq);
    for (std::uint64_t c = 1; c < horizon; c *= 10) report.checkpoints.push_back(c);
    report.checkpoints.push_back(horizon);
    const std::size_t n_cp = report.checkpoints.size();

    std::vector<double> running(n_trajectories * n_cp, 0.0);
    parallel_for(chunk_count(n_trajectories), resolve_threads(threads), [&](std::size_t chunk) {
        const std::size_t end = std::min(n_trajectories, (chunk + 1) * kChunkSize);
        for (std::size_t k = chunk * kChunkSize; k < end; ++k) {
            Simulator sim(config.params, start, StreamKey{config.key.master_seed, k});
            double sum = 0.0;
            std::size_t cp = 0;
            while (sim.steps() < horizon) {
                const double stake = sim.advance().stake;
                sum += stake * stake;
                if (sim.steps() == report.checkpoints[cp]) running[k * n_cp + cp++] = sum;
            }
        }
    });

    std::vector<double> column(n_trajectories);
    for (std::size_t cp = 0; cp < n_cp; ++cp) {
        for (std::size_t k = 0; k < n_trajectories; ++k) {
            column[k] = running[k * n_cp + cp];
            if (cp > 0 && column[k] < running[k * n_cp + cp - 1]) report.monotone = false;
        }
        report.cumulative_stake_sq.push_back(estimate_mean(column));
    }
    report.at_horizon = report.cumulative_stake_sq.back();
    report.passed = report.monotone &&
                    report.at_horizon.mean <= report.bound + kSigmaLevel * report.at_horizon.std_error;
    return report;
}

MartingaleReport verify_martingale(const TrajectoryConfig& config, std::vector<std::uint64_t> checkpoints,
                                   std::size_t n_trajectories, std::size_t threads) {
    config.params.validate();
    if (config.params.delta != 0.0) throw DomainError("the martingale property needs p = 1/2");
    if (config.params.tax_chi) throw DomainError("the taxed model is not a martingale");
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    if (checkpoints.empty() || checkpoints.front() == 0) throw DomainError("checkpoints must be positive");
    if (n_trajectories < 2) throw DomainError("need at least 2 trajectories");

    const WealthState start = initial_state(config);
    const std::size_t n_agents = start.size();
    const std::size_t n_cp = checkpoints.size();
    std::vector<double> samples(n_trajectories * n_cp * n_agents);

    parallel_for(chunk_count(n_trajectories), resolve_threads(threads), [&](std::size_t chunk) {
        const std::size_t end = std::min(n_trajectories, (chunk + 1) * kChunkSize);
        for (std::size_t k = chunk * kChunkSize; k < end; ++k) {
            Simulator sim(config.params, start, StreamKey{config.key.master_seed, k});
            for (std::size_t cp = 0; cp < n_cp; ++cp) {
                while (sim.steps() < checkpoints[cp]) sim.advance();
                const auto w = sim.wealth();
                std::copy(w.begin(), w.end(), samples.begin() + static_cast<std::ptrdiff_t>((k * n_cp + cp) * n_agents));
            }
        }
    });

    MartingaleReport report;
    report.n_trajectories = n_trajectories;
    report.passed = true;
    std::vector<double> column(n_trajectories);
    for (std::size_t cp = 0; cp < n_cp; ++cp) {
        for (std::size_t i = 0; i < n_agents; ++i) {
            for (std::size_t k = 0; k < n_trajectories; ++k) column[k] = samples[(k * n_cp + cp) * n_agents + i];
            MartingaleCheck check;
            check.step = checkpoints[cp];
            check.agent = i;
            check.initial_share = start[i];
            check.mean_wealth = estimate_mean(column);
            check.z = z_score(check.mean_wealth.mean, start[i], check.mean_wealth.std_error, 1e-12);
            check.consistent = std::abs(check.z) <= kSigmaLevel;
            report.passed = report.passed && check.consistent;
            report.checks.push_back(check);
        }
    }
    return report;
}

CondensationTimeTable condensation_time_study(const TrajectoryConfig& base, const std::vector<GridPoint>& grid,
                                              std::size_t n_trajectories, std::uint64_t master_seed,
                                              std::size_t threads) {
    if (base.params.tax_chi) throw DomainError("taxation prevents condensation; no condensation times to study");
    if (n_trajectories < 1) throw DomainError("need at least one trajectory per grid point");

    CondensationTimeTable table;
    for (const GridPoint& point : grid) {
        TrajectoryConfig config = base;
        config.params.n_agents = point.n_agents;
        config.params.delta = point.delta;
        config.params.fraction = point.fraction;
        config.condensation_epsilon = point.epsilon;
        config.initial = point.initial;
        config.record_every = config.max_steps;
        config.key = StreamKey{master_seed, 0};
        config.validate();

        std::vector<double> steps(n_trajectories);
        std::vector<char> condensed(n_trajectories, 0);
        parallel_for(chunk_count(n_trajectories), resolve_threads(threads), [&](std::size_t chunk) {
            const std::size_t end = std::min(n_trajectories, (chunk + 1) * kChunkSize);
            for (std::size_t k = chunk * kChunkSize; k < end; ++k) {
                const TrajectoryRecord record = run_trajectory(with_key(config, k));
                condensed[k] = record.stop_reason == StopReason::condensed;
                steps[k] = static_cast<double>(record.steps_run);
            }
        });

        CondensationTimeRow row;
        row.point = point;
        row.n_trajectories = n_trajectories;
        std::vector<double> hit;
        for (std::size_t k = 0; k < n_trajectories; ++k)
            if (condensed[k]) hit.push_back(steps[k]);
        row.n_condensed = hit.size();
        row.mean_steps = estimate_mean(hit);
        row.median_steps = estimate_median(hit);
        table.rows.push_back(std::move(row));
    }

    // Compare rows sharing everything but delta, in increasing delta.
    const std::size_t n_rows = table.rows.size();
    const auto same_cell = [&](std::size_t a, std::size_t b) {
        const GridPoint& p = table.rows[a].point;
        const GridPoint& q = table.rows[b].point;
        return p.n_agents == q.n_agents && p.fraction == q.fraction && p.epsilon == q.epsilon && p.initial == q.initial;
    };
    for (std::size_t a = 0; a < n_rows; ++a) {
        std::size_t best = n_rows;
        for (std::size_t b = 0; b < n_rows; ++b) {
            if (b == a || !same_cell(a, b) || !(table.rows[b].point.delta > table.rows[a].point.delta)) continue;
            if (best == n_rows || table.rows[b].point.delta < table.rows[best].point.delta) best = b;
        }
        if (best == n_rows) continue;
        const MeanEstimate& lo = table.rows[a].mean_steps;
        const MeanEstimate& hi = table.rows[best].mean_steps;
        MonotonicityNote note;
        note.lower_delta_row = a;
        note.higher_delta_row = best;
        note.not_slower = hi.mean <= lo.mean + kSigmaLevel * std::hypot(lo.std_error, hi.std_error);
        table.diagnostics.push_back(note);
    }
    return table;
}

}  // namespace yardsale
