#include "dangerwatch/response.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

void ResponseConfig::validate() const {
    if (effector_lifespan < 1) throw ConfigError("effector lifespan must be at least 1");
    if (memory_extension < 0) throw ConfigError("memory extension must be nonnegative");
    if (!(memory_fraction >= 0.0 && memory_fraction <= 1.0)) throw ConfigError("memory fraction must lie in [0, 1]");
}

PolicyStatement effector_to_policy(const EffectorTCell& eff) {
    return PolicyStatement{eff.tcr.seq_pattern, eff.tcr.arg_pattern, eff.action};
}

std::string EffectorIndex::key(std::size_t length, std::size_t position, std::string_view token) {
    std::string k(token);
    k.push_back('\0');
    k.push_back(static_cast<char>(length));
    k.push_back(static_cast<char>(position));
    return k;
}

namespace {

std::optional<std::size_t> first_concrete(const std::vector<std::string>& pattern) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != kWildcard) return i;
    }
    return std::nullopt;
}

}  // namespace

void EffectorIndex::add(std::uint64_t handle, const TCR& tcr) {
    const auto pos = first_concrete(tcr.seq_pattern);
    if (!pos) return;
    buckets_[key(tcr.seq_pattern.size(), *pos, tcr.seq_pattern[*pos])].push_back(handle);
    ++length_counts_[tcr.seq_pattern.size()];
}

void EffectorIndex::remove(std::uint64_t handle, const TCR& tcr) {
    const auto pos = first_concrete(tcr.seq_pattern);
    if (!pos) return;
    const auto it = buckets_.find(key(tcr.seq_pattern.size(), *pos, tcr.seq_pattern[*pos]));
    if (it == buckets_.end()) return;
    auto& handles = it->second;
    const auto h = std::find(handles.begin(), handles.end(), handle);
    if (h == handles.end()) return;
    handles.erase(h);
    if (handles.empty()) buckets_.erase(it);
    if (--length_counts_[tcr.seq_pattern.size()] == 0) length_counts_.erase(tcr.seq_pattern.size());
}

void EffectorIndex::clear() {
    buckets_.clear();
    length_counts_.clear();
}

const std::vector<std::uint64_t>* EffectorIndex::find(std::size_t length, std::size_t position,
                                                       std::string_view token) const {
    const auto it = buckets_.find(key(length, position, token));
    return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<std::size_t> EffectorIndex::lengths() const {
    std::vector<std::size_t> out;
    for (const auto& [len, count] : length_counts_) out.push_back(len);
    return out;
}

namespace {

// `resolve` maps an index handle to a position in `effectors`.
template <typename Resolve>
std::vector<ActionEvent> monitor_impl(std::span<EffectorTCell> effectors, const EffectorIndex& index,
                                      std::span<const AntigenEvent> window, std::size_t first_new, Resolve resolve) {
    std::vector<ActionEvent> events;
    if (index.empty() || window.empty()) return events;

    // Deny beats Permit, then the oldest effector wins.
    const auto better = [&](std::size_t a, std::size_t b) {
        const auto& ea = effectors[a];
        const auto& eb = effectors[b];
        if (ea.action != eb.action) return ea.action == Action::Deny;
        return ea.id < eb.id;
    };

    // Positions of each pid's events, keeping the global index of each.
    std::map<Pid, std::vector<std::size_t>> by_pid;
    for (std::size_t i = 0; i < window.size(); ++i) by_pid[window[i].pid].push_back(i);

    struct Hit {
        std::size_t end_index;
        std::size_t length;
        std::size_t effector;
    };
    std::vector<Hit> hits;
    std::vector<const AntigenEvent*> slice;
    const auto lengths = index.lengths();
    for (const auto& [pid, positions] : by_pid) {
        for (const std::size_t len : lengths) {
            if (positions.size() < len) continue;
            for (std::size_t start = 0; start + len <= positions.size(); ++start) {
                const std::size_t end_index = positions[start + len - 1];
                if (end_index < first_new) continue;
                slice.clear();
                for (std::size_t k = start; k < start + len; ++k) slice.push_back(&window[positions[k]]);
                std::optional<std::size_t> best;
                for (std::size_t k = 0; k < len; ++k) {
                    const auto* bucket = index.find(len, k, slice[k]->syscall);
                    if (!bucket) continue;
                    for (const auto handle : *bucket) {
                        const std::size_t e = resolve(handle);
                        if (best && !better(e, *best)) continue;
                        if (matches_window(effectors[e].tcr.seq_pattern, effectors[e].tcr.arg_pattern, slice)) best = e;
                    }
                }
                if (best) hits.push_back({end_index, len, *best});
            }
        }
    }

    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return a.end_index != b.end_index ? a.end_index < b.end_index : a.length < b.length;
    });
    events.reserve(hits.size());
    for (const auto& hit : hits) {
        EffectorTCell& eff = effectors[hit.effector];
        ++eff.match_count;
        const AntigenEvent& last = window[hit.end_index];
        events.push_back(ActionEvent{last.timestamp, last.pid, effector_to_policy(eff), eff.action, eff.id});
    }
    return events;
}

}  // namespace

std::vector<ActionEvent> monitor(std::span<EffectorTCell> effectors, std::span<const AntigenEvent> window,
                                 std::size_t first_new) {
    EffectorIndex index;
    for (std::size_t i = 0; i < effectors.size(); ++i) index.add(i, effectors[i].tcr);
    return monitor_impl(effectors, index, window, first_new, [](std::uint64_t h) { return static_cast<std::size_t>(h); });
}

std::vector<ActionEvent> monitor(std::span<EffectorTCell> effectors_by_id, const EffectorIndex& index,
                                 std::span<const AntigenEvent> window, std::size_t first_new) {
    return monitor_impl(effectors_by_id, index, window, first_new, [&](std::uint64_t id) {
        const auto it = std::lower_bound(effectors_by_id.begin(), effectors_by_id.end(), id,
                                         [](const EffectorTCell& e, std::uint64_t v) { return e.id < v; });
        if (it == effectors_by_id.end() || it->id != id) throw StateError("effector index out of sync");
        return static_cast<std::size_t>(it - effectors_by_id.begin());
    });
}

std::size_t memory_quota(std::size_t n, double fraction) {
    if (n == 0) return 0;
    // Guard against 0.1 * 10 landing a hair above 1.0 in binary.
    const double raw = fraction * static_cast<double>(n);
    const double rounded = std::round(raw);
    const double quota = std::abs(raw - rounded) < 1e-9 ? rounded : std::ceil(raw);
    return std::min(n, static_cast<std::size_t>(quota));
}

Retirement retire_effectors(std::vector<EffectorTCell> population, const ResponseConfig& cfg) {
    Retirement result;
    result.survivors.reserve(population.size());
    std::vector<EffectorTCell> candidates;
    for (auto& eff : population) {
        ++eff.age;
        if (eff.age < eff.lifespan) {
            result.survivors.push_back(std::move(eff));
        } else if (eff.memory) {
            result.dead.push_back(std::move(eff));
        } else {
            candidates.push_back(std::move(eff));
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const EffectorTCell& a, const EffectorTCell& b) {
        return a.match_count != b.match_count ? a.match_count > b.match_count : a.id < b.id;
    });
    const std::size_t keep = memory_quota(candidates.size(), cfg.memory_fraction);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i < keep) {
            candidates[i].memory = true;
            candidates[i].lifespan += cfg.memory_extension;
            result.memory.push_back(std::move(candidates[i]));
        } else {
            result.dead.push_back(std::move(candidates[i]));
        }
    }
    return result;
}

}  // namespace dangerwatch
