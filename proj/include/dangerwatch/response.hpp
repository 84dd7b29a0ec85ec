#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dangerwatch/lymph.hpp"
#include "dangerwatch/policy.hpp"
#include "dangerwatch/tissue.hpp"

namespace dangerwatch {

struct ResponseConfig {
    std::int64_t effector_lifespan = 200;
    std::int64_t memory_extension = 2000;
    double memory_fraction = 0.10;

    void validate() const;
};

struct ActionEvent {
    Timestep timestamp = 0;  // of the syscall that completed the matched window
    Pid pid = 0;
    PolicyStatement statement;
    Action action = Action::Permit;
    std::uint64_t effector_id = 0;
};

PolicyStatement effector_to_policy(const EffectorTCell& eff);

/// Tests every contiguous per-pid syscall window against the effectors.
///
/// Each window that matches at least one effector of its length yields one
/// ActionEvent. Deny effectors outrank Permit ones; within the winning action
/// the earliest-created effector (lowest id) takes the event and its
/// match_count. Windows ending before `first_new` are context only: they
/// provide history for windows that end later but are not themselves tested.
std::vector<ActionEvent> monitor(std::span<EffectorTCell> effectors, std::span<const AntigenEvent> window,
                                 std::size_t first_new = 0);

/// Lookup from (pattern length, position, syscall) to the effectors whose
/// first concrete token sits there. Every pattern has one, so a window only
/// needs checking against the buckets its own tokens select.
class EffectorIndex {
public:
    void add(std::uint64_t handle, const TCR& tcr);
    void remove(std::uint64_t handle, const TCR& tcr);
    void clear();

    const std::vector<std::uint64_t>* find(std::size_t length, std::size_t position, std::string_view token) const;
    /// Pattern lengths present, ascending.
    std::vector<std::size_t> lengths() const;
    bool empty() const noexcept { return buckets_.empty(); }

private:
    static std::string key(std::size_t length, std::size_t position, std::string_view token);

    std::unordered_map<std::string, std::vector<std::uint64_t>> buckets_;
    std::map<std::size_t, std::size_t> length_counts_;
};

/// monitor() over an id-sorted population with a maintained index keyed by
/// effector id. Produces the same events as the unindexed overload.
std::vector<ActionEvent> monitor(std::span<EffectorTCell> effectors_by_id, const EffectorIndex& index,
                                 std::span<const AntigenEvent> window, std::size_t first_new = 0);

struct Retirement {
    std::vector<EffectorTCell> memory;     // newly promoted this tick
    std::vector<EffectorTCell> dead;
    std::vector<EffectorTCell> survivors;  // not yet at their lifespan
};

/// Number of memory cells kept from a batch of n retirement candidates.
std::size_t memory_quota(std::size_t n, double fraction = 0.10);

/// Ages every effector; those reaching their lifespan are candidates. The top
/// memory_quota(n) candidates by match_count (earlier creation breaks ties)
/// become memory cells with an extended lifespan, the rest die. Memory cells
/// that reach their extended lifespan die without another selection round.
Retirement retire_effectors(std::vector<EffectorTCell> population, const ResponseConfig& cfg);

}  // namespace dangerwatch
