#include "yardsale/cli.hpp"

#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "yardsale/config.hpp"
#include "yardsale/errors.hpp"
#include "yardsale/experiments.hpp"
#include "yardsale/output.hpp"
#include "yardsale/verification.hpp"

namespace yardsale {

namespace {

struct Options {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t trajectories = 1000;
    std::size_t threads = 0;
    bool to_stdout = false;
    std::uint64_t steps = 1000;
    std::uint64_t horizon = 0;
    std::vector<std::size_t> grid_n;
    std::vector<double> grid_p;
    std::vector<double> grid_beta;
    std::vector<double> grid_epsilon;
};

// Thrown during setup; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Command {
public:
    Command(const Options& opts, bool seed_given, std::ostream& out, std::ostream& err)
        : opts_(opts), seed_given_(seed_given), out_(out), err_(err) {}

    RunConfig load() const {
        RunConfig cfg = load_config(opts_.config_path);
        if (seed_given_) cfg.trajectory.key.master_seed = opts_.seed;
        return cfg;
    }

    std::size_t threads() const { return opts_.threads == 0 ? default_thread_count() : opts_.threads; }

    void emit(const RunConfig& cfg, std::string_view suffix, const std::string& content) const {
        if (opts_.to_stdout) {
            out_ << content;
            return;
        }
        const auto path = output_path(cfg.out, suffix);
        write_file(path, content);
        err_ << "wrote " << path.string() << '\n';
    }

    const Options& opts() const { return opts_; }
    std::ostream& log() const { return err_; }

private:
    const Options& opts_;
    bool seed_given_;
    std::ostream& out_;
    std::ostream& err_;
};

int run_simulate(const Command& cmd, const RunConfig& cfg) {
    const TrajectoryRecord record = run_trajectory(cfg.trajectory);
    cmd.log() << "simulate: " << to_string(record.stop_reason) << " after " << record.steps_run << " steps\n";
    std::ostringstream csv;
    write_trajectory_csv(csv, record.snapshots);
    cmd.emit(cfg, ".trajectory.csv", csv.str());
    if (!cmd.opts().to_stdout) cmd.emit(cfg, ".record.json", record_to_json(record, cfg).dump(2) + "\n");
    return kExitOk;
}

int run_ensemble_cmd(const Command& cmd, const RunConfig& cfg) {
    const EnsembleSummary summary =
        run_ensemble(cfg.trajectory, cmd.opts().trajectories, cfg.trajectory.key.master_seed, cmd.threads());
    cmd.log() << "ensemble: " << summary.n_condensed << " of " << summary.n_trajectories << " condensed\n";
    cmd.emit(cfg, ".summary.json", summary_to_json(summary, cfg).dump(2) + "\n");
    return kExitOk;
}

int run_win_prob(const Command& cmd, const RunConfig& cfg) {
    const EnsembleSummary summary =
        run_ensemble(cfg.trajectory, cmd.opts().trajectories, cfg.trajectory.key.master_seed, cmd.threads());
    const auto estimates = estimate_win_probabilities(summary);
    bool all_consistent = true;
    for (const auto& e : estimates) {
        cmd.log() << "agent " << e.agent << ": win frequency " << format_double(e.estimate) << " (initial share "
                  << format_double(e.initial_share) << ", z " << e.z << ")" << (e.consistent ? "" : " FLAGGED")
                  << '\n';
        all_consistent = all_consistent && e.consistent;
    }
    auto doc = summary_to_json(summary, cfg);
    doc["win_probabilities"] = to_json(estimates);
    doc["passed"] = all_consistent;
    cmd.emit(cfg, ".win_prob.json", doc.dump(2) + "\n");
    return all_consistent ? kExitOk : kExitCheckFailed;
}

int run_verify_increment(const Command& cmd, const RunConfig& cfg) {
    const auto report =
        verify_increment_bound(cfg.trajectory, cmd.opts().steps, cmd.opts().trajectories, cmd.threads());
    cmd.log() << "verify-increment: total gap z " << report.total_gap_z << ", total residual z "
              << report.total_residual_z << ", max per-step |z| " << report.max_abs_gap_z << " (threshold "
              << report.per_step_z_threshold << "): " << (report.passed ? "pass" : "FAIL") << '\n';
    cmd.emit(cfg, ".increment.json", to_json(report).dump(2) + "\n");
    return report.passed ? kExitOk : kExitCheckFailed;
}

int run_verify_summability(const Command& cmd, const RunConfig& cfg) {
    const std::uint64_t horizon = cmd.opts().horizon ? cmd.opts().horizon : cfg.trajectory.max_steps;
    const auto report = verify_stake_summability(cfg.trajectory, horizon, cmd.opts().trajectories, cmd.threads());
    cmd.log() << "verify-summability: mean sum of squared stakes " << format_double(report.at_horizon.mean)
              << " +/- " << format_double(3 * report.at_horizon.std_error) << ", bound "
              << format_double(report.bound) << ": " << (report.passed ? "pass" : "FAIL") << '\n';
    cmd.emit(cfg, ".summability.json", to_json(report).dump(2) + "\n");
    return report.passed ? kExitOk : kExitCheckFailed;
}

std::vector<GridPoint> build_grid(const Options& opts, const RunConfig& cfg) {
    const auto& traj = cfg.trajectory;
    std::vector<std::size_t> ns = opts.grid_n.empty() ? std::vector<std::size_t>{traj.params.n_agents} : opts.grid_n;
    std::vector<double> deltas;
    for (double p : opts.grid_p) {
        if (!(p >= 0.5 && p < 1.0)) throw UsageError("--grid-p values must lie in [0.5, 1)");
        deltas.push_back(p - 0.5);
    }
    if (deltas.empty()) deltas.push_back(traj.params.delta);
    std::vector<FractionDistribution> fractions;
    for (double b : opts.grid_beta) fractions.push_back(ConstantFraction{b});
    if (fractions.empty()) fractions.push_back(traj.params.fraction);
    std::vector<double> epsilons = opts.grid_epsilon;
    if (epsilons.empty()) epsilons.push_back(traj.condensation_epsilon.value_or(kDefaultCondensationEpsilon));

    std::vector<GridPoint> grid;
    for (std::size_t n : ns)
        for (double d : deltas)
            for (const auto& f : fractions)
                for (double eps : epsilons) {
                    GridPoint point{n, d, f, eps, UniformInitial{}};
                    // The configured initial wealth applies wherever its length fits.
                    if (n == traj.params.n_agents) point.initial = traj.initial;
                    grid.push_back(point);
                }
    return grid;
}

int run_condense_times(const Command& cmd, const RunConfig& cfg, const std::vector<GridPoint>& grid) {
    const TrajectoryConfig& base = cfg.trajectory;
    const auto table =
        condensation_time_study(base, grid, cmd.opts().trajectories, base.key.master_seed, cmd.threads());
    for (const auto& note : table.diagnostics)
        if (!note.not_slower)
            cmd.log() << "note: row " << note.higher_delta_row << " (larger bias) condensed slower than row "
                      << note.lower_delta_row << '\n';
    std::ostringstream csv;
    write_condensation_csv(csv, table);
    cmd.emit(cfg, ".condense_times.csv", csv.str());
    if (!cmd.opts().to_stdout) cmd.emit(cfg, ".condense_times.json", to_json(table).dump(2) + "\n");
    return kExitOk;
}

void add_common(CLI::App* sub, Options& opts, bool with_trajectories) {
    sub->add_option("--config", opts.config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", opts.seed, "Override the master seed");
    sub->add_option("--threads", opts.threads, "Worker threads (default: YARDSALE_THREADS or all cores)");
    sub->add_flag("--stdout", opts.to_stdout, "Write the data document to standard output instead of files");
    if (with_trajectories)
        sub->add_option("--trajectories", opts.trajectories, "Number of trajectories")->check(CLI::PositiveNumber);
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opts;
    CLI::App app{"Yard-sale wealth-exchange simulator and verification toolkit", "yardsale"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Run one trajectory and write its metrics CSV");
    add_common(simulate, opts, false);
    auto* ensemble = app.add_subcommand("ensemble", "Run an ensemble and write its summary");
    add_common(ensemble, opts, true);
    auto* increment = app.add_subcommand("verify-increment", "Check E|X_n|^2 - E|X_{n-1}|^2 against 2 E w^2");
    add_common(increment, opts, true);
    increment->add_option("--steps", opts.steps, "Steps per trajectory")->check(CLI::PositiveNumber);
    auto* summability = app.add_subcommand("verify-summability", "Check the mean sum of squared stakes");
    add_common(summability, opts, true);
    summability->add_option("--horizon", opts.horizon, "Steps per trajectory (default: max_steps)")
        ->check(CLI::PositiveNumber);
    auto* winprob = app.add_subcommand("win-prob", "Estimate win probabilities against initial shares");
    add_common(winprob, opts, true);
    auto* condense = app.add_subcommand("condense-times", "Condensation times over a parameter grid");
    add_common(condense, opts, true);
    condense->add_option("--grid-n", opts.grid_n, "Agent counts")->delimiter(',');
    condense->add_option("--grid-p", opts.grid_p, "Win probabilities of the richer agent")->delimiter(',');
    condense->add_option("--grid-beta", opts.grid_beta, "Constant fractions")->delimiter(',');
    condense->add_option("--grid-epsilon", opts.grid_epsilon, "Condensation thresholds")->delimiter(',');

    std::vector<std::string> argv_storage{"yardsale"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        err << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    CLI::App* active = app.get_subcommands().front();
    const bool seed_given = active->count("--seed") > 0;
    Command cmd(opts, seed_given, out, err);
    const std::string name = active->get_name();

    RunConfig cfg;
    std::vector<GridPoint> grid;
    try {
        cfg = cmd.load();
        const auto& params = cfg.trajectory.params;
        if (name == "win-prob" && params.delta != 0.0)
            throw UsageError("win-prob requires p = 0.5: win probabilities equal initial shares only without bias");
        if ((name == "verify-increment" || name == "verify-summability") && !params.is_plain())
            throw UsageError(name + " requires the plain model (no lambda, no chi)");
        if (name == "condense-times") {
            if (params.tax_chi) throw UsageError("condense-times: taxation prevents condensation");
            grid = build_grid(opts, cfg);
            for (const auto& point : grid) {
                TrajectoryConfig probe = cfg.trajectory;
                probe.params.n_agents = point.n_agents;
                probe.params.delta = point.delta;
                probe.params.fraction = point.fraction;
                probe.condensation_epsilon = point.epsilon;
                probe.initial = point.initial;
                probe.validate();
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << opts.config_path << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (name == "simulate") return run_simulate(cmd, cfg);
        if (name == "ensemble") return run_ensemble_cmd(cmd, cfg);
        if (name == "win-prob") return run_win_prob(cmd, cfg);
        if (name == "verify-increment") return run_verify_increment(cmd, cfg);
        if (name == "verify-summability") return run_verify_summability(cmd, cfg);
        if (name == "condense-times") return run_condense_times(cmd, cfg, grid);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    err << "error: unknown subcommand " << name << '\n';
    return kExitConfig;
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace yardsale
