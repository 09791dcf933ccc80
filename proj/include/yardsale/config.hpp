#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "yardsale/experiments.hpp"

namespace yardsale {

/// A run configuration document: the trajectory settings plus the output prefix.
///
/// Keys: n_agents, initial ("uniform" | list), p (or delta, never both),
/// fraction ({kind: constant|uniform|beta, ...}), lambda, chi, max_steps,
/// condensation_epsilon (number or null), record_every, seed, out.
struct RunConfig {
    TrajectoryConfig trajectory;
    std::string out = "yardsale";

    bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::optional<std::size_t> line, const std::string& message);
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    std::optional<std::size_t> line_;
};

/// Parses and validates a JSON run configuration. Throws ConfigError.
RunConfig parse_config(std::string_view text);

/// Reads `path` and parses it. Throws IoError when unreadable, ConfigError when invalid.
RunConfig load_config(const std::filesystem::path& path);

/// Normalized document: p instead of delta, defaults spelled out.
nlohmann::ordered_json config_to_json(const RunConfig& config);

nlohmann::ordered_json fraction_to_json(const FractionDistribution& dist);

}  // namespace yardsale
