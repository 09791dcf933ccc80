#include "yardsale/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "yardsale/errors.hpp"
#include "yardsale/simulator.hpp"

namespace yardsale {

void TrajectoryConfig::validate() const {
    params.validate();
    if (max_steps < 1) throw DomainError("max_steps must be at least 1");
    if (record_every < 1) throw DomainError("record_every must be at least 1");
    if (const auto* explicit_wealth = std::get_if<std::vector<double>>(&initial)) {
        if (explicit_wealth->size() != params.n_agents)
            throw DomainError("initial wealth has " + std::to_string(explicit_wealth->size()) +
                              " entries, expected " + std::to_string(params.n_agents));
        (void)make_state(*explicit_wealth);
    }
    if (condensation_epsilon) {
        const double eps = *condensation_epsilon;
        if (!(eps > 0.0 && eps < 1.0)) throw DomainError("condensation_epsilon must lie in (0,1)");
        if (params.tax_chi) {
            // Under the flat tax the largest share never exceeds 1 - chi (N-1)/N.
            const double n = static_cast<double>(params.n_agents);
            const double gap = *params.tax_chi * (n - 1.0) / n;
            if (eps < gap)
                throw DomainError("condensation stop is unreachable under taxation: epsilon " +
                                  std::to_string(eps) + " < chi (N-1)/N = " + std::to_string(gap));
        }
    }
}

WealthState initial_state(const TrajectoryConfig& config) {
    if (const auto* explicit_wealth = std::get_if<std::vector<double>>(&config.initial))
        return make_state(*explicit_wealth);
    return uniform_state(config.params.n_agents);
}

const char* to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::condensed: return "condensed";
        case StopReason::max_steps: return "max_steps";
    }
    return "unknown";
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& config) {
    config.validate();
    const WealthState start = initial_state(config);
    Simulator sim(config.params, start, config.key);
    TrajectoryRecord record;

    const bool stop_enabled = config.condensation_epsilon.has_value();
    const double threshold = stop_enabled ? 1.0 - *config.condensation_epsilon : 2.0;
    const bool taxed = config.params.tax_chi.has_value();

    record.snapshots.push_back(snapshot(sim.wealth(), 0, 0.0));
    bool condensed = stop_enabled && max_wealth(sim.wealth()) >= threshold;
    double last_stake = 0.0;
    while (!condensed && sim.steps() < config.max_steps) {
        const StepOutcome out = sim.advance();
        last_stake = out.stake;
        record.cumulative_stake_sq += out.stake * out.stake;
        if (stop_enabled) {
            const auto w = sim.wealth();
            // Without tax only the traded pair can cross the threshold.
            condensed = taxed ? max_wealth(w) >= threshold
                              : (w[out.poorer] >= threshold || w[out.richer] >= threshold);
        }
        if (sim.steps() % config.record_every == 0) record.snapshots.push_back(snapshot(sim.wealth(), sim.steps(), last_stake));
    }
    if (record.snapshots.back().step != sim.steps())
        record.snapshots.push_back(snapshot(sim.wealth(), sim.steps(), last_stake));

    record.steps_run = sim.steps();
    record.final_wealth.assign(sim.wealth().begin(), sim.wealth().end());
    if (condensed) {
        record.stop_reason = StopReason::condensed;
        record.condensation_step = sim.steps();
        record.winner = argmax(sim.wealth());
    }
    return record;
}

namespace {

constexpr std::size_t kChunkSize = 32;

// acc holds the sum of earlier series, each carried forward at its last value
// to acc.size(); add `values` the same way.
void add_carried(std::vector<double>& acc, std::span<const double> values) {
    if (values.empty()) return;
    if (values.size() > acc.size()) {
        const double tail = acc.empty() ? 0.0 : acc.back();
        acc.resize(values.size(), tail);
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += i < values.size() ? values[i] : values.back();
}

}  // namespace

EnsembleSummary run_ensemble(const TrajectoryConfig& config_template, std::size_t n_trajectories,
                             std::uint64_t master_seed, std::size_t threads) {
    if (n_trajectories < 1) throw DomainError("an ensemble needs at least one trajectory");
    config_template.validate();

    std::vector<StopReason> stop(n_trajectories, StopReason::max_steps);
    std::vector<std::uint64_t> steps(n_trajectories, 0);
    std::vector<double> stake_sq(n_trajectories, 0.0);
    std::vector<std::optional<std::size_t>> winners(n_trajectories);

    const std::size_t n_chunks = (n_trajectories + kChunkSize - 1) / kChunkSize;
    std::vector<std::vector<double>> chunk_series(n_chunks);

    parallel_for(n_chunks, threads == 0 ? default_thread_count() : threads, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kChunkSize;
        const std::size_t end = std::min(n_trajectories, begin + kChunkSize);
        std::vector<double> grid_values;
        for (std::size_t k = begin; k < end; ++k) {
            TrajectoryConfig config = config_template;
            config.key = StreamKey{master_seed, k};
            const TrajectoryRecord record = run_trajectory(config);
            stop[k] = record.stop_reason;
            steps[k] = record.steps_run;
            stake_sq[k] = record.cumulative_stake_sq;
            winners[k] = record.winner;
            grid_values.clear();
            for (const auto& s : record.snapshots)
                if (s.step % config.record_every == 0) grid_values.push_back(s.norm_sq);
            if (record.snapshots.back().step % config.record_every != 0)
                grid_values.push_back(record.snapshots.back().norm_sq);
            add_carried(chunk_series[chunk], grid_values);
        }
    });

    EnsembleSummary summary;
    summary.config = config_template;
    summary.config.key = StreamKey{master_seed, 0};
    summary.n_trajectories = n_trajectories;
    summary.win_counts.assign(config_template.params.n_agents, 0);
    std::vector<double> condensation_steps;
    for (std::size_t k = 0; k < n_trajectories; ++k) {
        if (stop[k] != StopReason::condensed) continue;
        ++summary.n_condensed;
        condensation_steps.push_back(static_cast<double>(steps[k]));
        ++summary.win_counts[*winners[k]];
    }
    summary.condensation_step = estimate_mean(condensation_steps);
    summary.cumulative_stake_sq = estimate_mean(stake_sq);

    std::vector<double> series;
    for (const auto& c : chunk_series) add_carried(series, c);
    summary.mean_norm_sq.resize(series.size());
    summary.series_steps.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        summary.mean_norm_sq[i] = series[i] / static_cast<double>(n_trajectories);
        summary.series_steps[i] = i * config_template.record_every;
    }
    return summary;
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("YARDSALE_THREADS")) {
        std::size_t value = 0;
        const char* end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc{} && ptr == end && value > 0) return value;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::min(std::max<std::size_t>(threads, 1), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_index = n;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace yardsale
