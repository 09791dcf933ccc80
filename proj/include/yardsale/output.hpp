#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "yardsale/config.hpp"
#include "yardsale/experiments.hpp"
#include "yardsale/verification.hpp"

namespace yardsale {

inline constexpr std::string_view kTrajectoryCsvHeader = "step,max_wealth,norm_sq,ipr,gini,total,last_stake";

/// Shortest-safe rendering with 17 significant digits; parses back to the same double.
std::string format_double(double value);

void write_trajectory_csv(std::ostream& out, std::span<const MetricsSnapshot> snapshots);
/// Throws IoError on a malformed header or row.
std::vector<MetricsSnapshot> read_trajectory_csv(std::istream& in);

nlohmann::ordered_json to_json(const MeanEstimate& estimate);
nlohmann::ordered_json record_to_json(const TrajectoryRecord& record, const RunConfig& config);
/// Win counts, interval estimates, the mean norm series, and the config echo
/// including the master seed.
nlohmann::ordered_json summary_to_json(const EnsembleSummary& summary, const RunConfig& config);
nlohmann::ordered_json to_json(const std::vector<WinEstimate>& estimates);
nlohmann::ordered_json to_json(const IncrementBoundReport& report);
nlohmann::ordered_json to_json(const StakeSummabilityReport& report);
nlohmann::ordered_json to_json(const CondensationTimeTable& table);
void write_condensation_csv(std::ostream& out, const CondensationTimeTable& table);

/// "<prefix><suffix>", e.g. output_path("runs/a", ".summary.json").
std::filesystem::path output_path(const std::string& prefix, std::string_view suffix);

/// Writes `content` to `path`, creating parent directories. Throws IoError naming the path.
void write_file(const std::filesystem::path& path, std::string_view content);

/// <out>.trajectory.csv and <out>.record.json.
void write_outputs(const TrajectoryRecord& record, const RunConfig& config);
/// <out>.summary.json.
void write_outputs(const EnsembleSummary& summary, const RunConfig& config);

}  // namespace yardsale
