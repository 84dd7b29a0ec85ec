#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dangerwatch/config.hpp"
#include "dangerwatch/engine.hpp"
#include "dangerwatch/policy.hpp"
#include "dangerwatch/trace_io.hpp"

namespace dangerwatch {

struct ReplayInputs {
    std::filesystem::path trace;
    std::optional<std::filesystem::path> metrics;
    std::optional<std::filesystem::path> base_policy;
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;  // overrides the config's rng_seed
};

struct ReplayResult {
    RunReport report;
    std::string policy_text;  // canonical policy file contents
    std::string action_log;   // JSON lines
    std::string report_text;
    std::vector<std::string> warnings;
};

/// One JSON object per line: {"ts":..,"pid":..,"action":"deny","statement":"match seq(...) -> deny"}.
std::string format_action_log(std::span<const ActionEvent> actions);

/// Runs the engine over in-memory records until the input is exhausted.
ReplayResult replay_records(const EngineConfig& cfg, PolicySet base, std::vector<Record> records);

/// Loads the files (a missing or absent base policy means an empty policy
/// with default `ask`), replays them and returns every output. Parse errors
/// carry the file name and line number.
ReplayResult run_replay(const ReplayInputs& inputs);

/// Writes policy.txt, actions.jsonl and report.txt into out_dir.
void write_replay_outputs(const ReplayResult& result, const std::filesystem::path& out_dir);

EngineConfig load_config(const std::optional<std::filesystem::path>& path);

}  // namespace dangerwatch
