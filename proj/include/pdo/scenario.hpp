#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pdo {

inline constexpr const char* version_string = "0.4.1";

const std::vector<std::string>& scenario_tasks();

struct ScenarioOptions {
    std::string task;                    // empty: taken from the config
    std::filesystem::path output_dir;    // empty: config "output_dir"
    std::optional<std::uint64_t> seed;   // overrides config "seed"
    std::optional<unsigned> threads;     // overrides config "threads"
};

struct ScenarioOutcome {
    std::string task;
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> files;  // report.json, manifest.json, data files
};

// Parses and validates the JSON config, runs the task, writes report.json,
// manifest.json and any columnar data files. Throws pdo::Error.
ScenarioOutcome run_scenario(const std::string& config_json, const ScenarioOptions& options);

} // namespace pdo
