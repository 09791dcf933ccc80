#include "yardsale/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "yardsale/errors.hpp"

namespace yardsale {

using nlohmann::ordered_json;

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, std::span<const MetricsSnapshot> snapshots) {
    out << kTrajectoryCsvHeader << '\n';
    for (const auto& s : snapshots) {
        out << s.step << ',' << format_double(s.max_wealth) << ',' << format_double(s.norm_sq) << ','
            << format_double(s.ipr) << ',' << format_double(s.gini) << ',' << format_double(s.total) << ','
            << format_double(s.last_stake) << '\n';
    }
}

std::vector<MetricsSnapshot> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryCsvHeader) throw IoError("trajectory CSV: unexpected header");
    std::vector<MetricsSnapshot> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        MetricsSnapshot s;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        const auto bad = [&] { return IoError("trajectory CSV: malformed row " + std::to_string(row)); };
        auto r = std::from_chars(p, end, s.step);
        if (r.ec != std::errc{}) throw bad();
        p = r.ptr;
        for (double* field : {&s.max_wealth, &s.norm_sq, &s.ipr, &s.gini, &s.total, &s.last_stake}) {
            if (p == end || *p != ',') throw bad();
            r = std::from_chars(p + 1, end, *field);
            if (r.ec != std::errc{}) throw bad();
            p = r.ptr;
        }
        if (p != end) throw bad();
        out.push_back(s);
    }
    return out;
}

ordered_json to_json(const MeanEstimate& e) {
    return {{"count", e.count}, {"mean", e.mean}, {"std_error", e.std_error}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
}

namespace {

ordered_json optional_json(const auto& value) {
    return value ? ordered_json(*value) : ordered_json(nullptr);
}

// JSON has no infinities; unbounded z-scores are written as null.
ordered_json finite_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

ordered_json record_to_json(const TrajectoryRecord& record, const RunConfig& config) {
    ordered_json doc;
    doc["stop_reason"] = to_string(record.stop_reason);
    doc["steps_run"] = record.steps_run;
    doc["condensation_step"] = optional_json(record.condensation_step);
    doc["winner"] = optional_json(record.winner);
    doc["cumulative_stake_sq"] = record.cumulative_stake_sq;
    doc["snapshot_count"] = record.snapshots.size();
    doc["final_wealth"] = record.final_wealth;
    doc["stream"] = {{"master_seed", config.trajectory.key.master_seed},
                     {"trajectory_index", config.trajectory.key.trajectory_index}};
    doc["config"] = config_to_json(config);
    return doc;
}

ordered_json summary_to_json(const EnsembleSummary& summary, const RunConfig& config) {
    RunConfig echo = config;
    echo.trajectory = summary.config;
    ordered_json doc;
    doc["master_seed"] = summary.config.key.master_seed;
    doc["n_trajectories"] = summary.n_trajectories;
    doc["n_condensed"] = summary.n_condensed;
    doc["win_counts"] = summary.win_counts;
    doc["condensation_step"] = to_json(summary.condensation_step);
    doc["cumulative_stake_sq"] = to_json(summary.cumulative_stake_sq);
    doc["mean_norm_sq"] = {{"steps", summary.series_steps}, {"values", summary.mean_norm_sq}};
    doc["config"] = config_to_json(echo);
    return doc;
}

ordered_json to_json(const std::vector<WinEstimate>& estimates) {
    ordered_json rows = ordered_json::array();
    for (const auto& e : estimates) {
        rows.push_back({{"agent", e.agent},
                        {"initial_share", e.initial_share},
                        {"estimate", e.estimate},
                        {"ci_low", e.ci_low},
                        {"ci_high", e.ci_high},
                        {"z", finite_or_null(e.z)},
                        {"consistent", e.consistent}});
    }
    return rows;
}

ordered_json to_json(const IncrementBoundReport& r) {
    ordered_json doc;
    doc["delta"] = r.delta;
    doc["n_trajectories"] = r.n_trajectories;
    doc["n_steps"] = r.n_steps;
    doc["passed"] = r.passed;
    doc["per_step_z_threshold"] = r.per_step_z_threshold;
    doc["max_abs_gap_z"] = finite_or_null(r.max_abs_gap_z);
    doc["max_abs_residual_z"] = finite_or_null(r.max_abs_residual_z);
    doc["total_gap"] = to_json(r.total_gap);
    doc["total_gap_z"] = finite_or_null(r.total_gap_z);
    doc["total_bias_term"] = to_json(r.total_bias_term);
    doc["total_residual"] = to_json(r.total_residual);
    doc["total_residual_z"] = finite_or_null(r.total_residual_z);
    ordered_json steps = ordered_json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"step", s.step},
                         {"mean_increment", s.mean_increment},
                         {"mean_twice_stake_sq", s.mean_twice_stake_sq},
                         {"gap", s.gap.mean},
                         {"gap_se", s.gap.std_error},
                         {"bias_term", s.bias_term.mean},
                         {"residual", s.residual.mean},
                         {"residual_se", s.residual.std_error},
                         {"gap_z", finite_or_null(s.gap_z)},
                         {"residual_z", finite_or_null(s.residual_z)}});
    }
    doc["steps"] = std::move(steps);
    return doc;
}

ordered_json to_json(const StakeSummabilityReport& r) {
    ordered_json doc;
    doc["horizon"] = r.horizon;
    doc["n_trajectories"] = r.n_trajectories;
    doc["initial_norm_sq"] = r.initial_norm_sq;
    doc["bound"] = r.bound;
    doc["coarse_bound"] = r.coarse_bound;
    doc["at_horizon"] = to_json(r.at_horizon);
    doc["monotone"] = r.monotone;
    doc["passed"] = r.passed;
    ordered_json series = ordered_json::array();
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i)
        series.push_back({{"step", r.checkpoints[i]}, {"cumulative_stake_sq", to_json(r.cumulative_stake_sq[i])}});
    doc["checkpoints"] = std::move(series);
    return doc;
}

namespace {

std::string describe_initial(const InitialWealth& initial) {
    const auto* wealth = std::get_if<std::vector<double>>(&initial);
    if (!wealth) return "uniform";
    std::string out;
    for (double x : *wealth) out += (out.empty() ? "" : " ") + format_double(x);
    return out;
}

}  // namespace

ordered_json to_json(const CondensationTimeTable& table) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"n_agents", r.point.n_agents},
                        {"p", 0.5 + r.point.delta},
                        {"fraction", fraction_to_json(r.point.fraction)},
                        {"epsilon", r.point.epsilon},
                        {"initial", describe_initial(r.point.initial)},
                        {"n_trajectories", r.n_trajectories},
                        {"n_condensed", r.n_condensed},
                        {"mean_steps", to_json(r.mean_steps)},
                        {"median_steps", {{"median", r.median_steps.median},
                                          {"ci_low", r.median_steps.ci_low},
                                          {"ci_high", r.median_steps.ci_high}}}});
    }
    ordered_json notes = ordered_json::array();
    for (const auto& n : table.diagnostics)
        notes.push_back({{"lower_delta_row", n.lower_delta_row},
                         {"higher_delta_row", n.higher_delta_row},
                         {"not_slower", n.not_slower}});
    return {{"rows", std::move(rows)}, {"monotonicity", std::move(notes)}};
}

void write_condensation_csv(std::ostream& out, const CondensationTimeTable& table) {
    out << "n_agents,p,mean_fraction,epsilon,n_trajectories,n_condensed,mean_steps,mean_ci_low,mean_ci_high,"
           "median_steps,median_ci_low,median_ci_high\n";
    for (const auto& r : table.rows) {
        out << r.point.n_agents << ',' << format_double(0.5 + r.point.delta) << ','
            << format_double(mean_fraction(r.point.fraction)) << ',' << format_double(r.point.epsilon) << ','
            << r.n_trajectories << ',' << r.n_condensed << ',' << format_double(r.mean_steps.mean) << ','
            << format_double(r.mean_steps.ci_low) << ',' << format_double(r.mean_steps.ci_high) << ','
            << format_double(r.median_steps.median) << ',' << format_double(r.median_steps.ci_low) << ','
            << format_double(r.median_steps.ci_high) << '\n';
    }
}

std::filesystem::path output_path(const std::string& prefix, std::string_view suffix) {
    return std::filesystem::path(prefix + std::string(suffix));
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

void write_outputs(const TrajectoryRecord& record, const RunConfig& config) {
    std::ostringstream csv;
    write_trajectory_csv(csv, record.snapshots);
    write_file(output_path(config.out, ".trajectory.csv"), csv.str());
    write_file(output_path(config.out, ".record.json"), record_to_json(record, config).dump(2) + "\n");
}

void write_outputs(const EnsembleSummary& summary, const RunConfig& config) {
    write_file(output_path(config.out, ".summary.json"), summary_to_json(summary, config).dump(2) + "\n");
}

}  // namespace yardsale
