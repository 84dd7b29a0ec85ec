#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "dangerwatch/dendritic.hpp"
#include "dangerwatch/lymph.hpp"
#include "dangerwatch/response.hpp"
#include "dangerwatch/signals.hpp"

namespace dangerwatch {

struct EngineConfig {
    std::uint64_t rng_seed = 42;
    std::size_t dc_population_size = 100;
    std::size_t tissue_capacity = 512;
    std::size_t timestamps_per_tick = 1;  // distinct input timestamps batched into one tick

    SignalConfig signals;
    WeightMatrix weights;
    DcConfig dc;
    LymphConfig lymph;
    ResponseConfig response;

    /// Checks every field against its bounds and derives the lymph evidence
    /// scale from the migration-threshold range. Throws ConfigError.
    void finalize();
};

/// Reads `key = value` lines ('#' comments). Unknown keys, duplicate keys and
/// malformed values are ConfigErrors naming the line. Missing keys keep their
/// defaults. The result is finalized.
EngineConfig parse_config(std::istream& in);
EngineConfig parse_config_text(std::string_view text);

/// Canonical `key = value` dump of every setting, parseable by parse_config.
std::string config_to_text(const EngineConfig& cfg);

/// All recognised config keys in dump order.
const std::vector<std::string>& config_keys();

}  // namespace dangerwatch
