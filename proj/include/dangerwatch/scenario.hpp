#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dangerwatch/trace_io.hpp"

namespace dangerwatch {

enum class ScenarioKind { Benign, Attack };

/// Synthetic replay fixture: a web-server process and a logger process with
/// stable metrics, plus (for Attack) a burst in which the server repeatedly
/// issues a distinctive, policy-violating 3-gram while its cpu and memory
/// swing and the host load climbs. These fixtures exercise the pipeline; they
/// are not a model of any real exploit.
struct ScenarioParams {
    ScenarioKind kind = ScenarioKind::Benign;
    std::int64_t ticks = 500;
    std::uint64_t seed = 42;
    std::int64_t burst_start = 300;
    std::int64_t burst_length = 20;
    int attack_reps_per_tick = 3;
    Timestep first_timestamp = 0;
};

struct Scenario {
    std::vector<Record> trace;    // S records
    std::vector<Record> metrics;  // M and H records
    std::vector<std::string> injected_ngram;  // empty for benign runs
    std::vector<std::string> injected_args;   // first argument of each injected call
};

inline constexpr Pid kScenarioServerPid = 1000;
inline constexpr Pid kScenarioLoggerPid = 1001;

Scenario generate_scenario(const ScenarioParams& params);

/// Writes trace.tsv (canonical S lines) and metrics.tsv (metrics-file format).
void write_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

ScenarioKind parse_scenario_kind(const std::string& name);

}  // namespace dangerwatch
