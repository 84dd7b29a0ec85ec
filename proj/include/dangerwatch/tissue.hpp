#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "dangerwatch/random.hpp"
#include "dangerwatch/signals.hpp"

namespace dangerwatch {

using AntigenId = std::uint64_t;

/// One observed system call.
struct AntigenEvent {
    AntigenId id = 0;
    Timestep timestamp = 0;
    Pid pid = 0;
    std::string syscall;
    std::vector<std::string> args;
    bool violation = false;  // matched no base-policy statement, feeds PAMP

    friend bool operator==(const AntigenEvent&, const AntigenEvent&) = default;
};

/// Time-indexed antigen buffer plus the latest signal vector per process.
///
/// The buffer is a bounded FIFO: once `capacity` events are held, each new
/// ingest evicts the oldest one. Antigen is pooled host-wide; every event
/// keeps its pid so a per-process view can be recovered.
class TissueStore {
public:
    static constexpr std::size_t kDefaultCapacity = 512;

    explicit TissueStore(std::size_t capacity = kDefaultCapacity);

    /// Assigns the next id and appends. Throws InputError if the record's
    /// timestamp is behind the clock.
    AntigenId ingest_syscall(AntigenEvent record);

    void ingest_signals(Pid pid, const SignalVector& sv);
    void clear_signals() { current_signals_.clear(); }

    /// n draws, uniform with replacement; empty buffer yields an empty list.
    std::vector<AntigenEvent> sample_antigens(Rng& rng, std::size_t n) const;

    /// n anchors drawn like sample_antigens; each is returned together with the
    /// events that follow it for the same pid, up to max_len events in total.
    std::vector<std::vector<AntigenEvent>> sample_fragments(Rng& rng, std::size_t n, std::size_t max_len) const;

    Timestep advance() { return ++clock_; }

    /// Component-wise mean of all current per-pid vectors (zero vector if none).
    SignalVector pooled_signals() const;

    Timestep clock() const noexcept { return clock_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return buffer_.size(); }
    bool empty() const noexcept { return buffer_.empty(); }
    const std::deque<AntigenEvent>& buffer() const noexcept { return buffer_; }
    const std::map<Pid, SignalVector>& current_signals() const noexcept { return current_signals_; }

private:
    std::size_t capacity_;
    Timestep clock_ = 0;
    AntigenId next_id_ = 0;
    std::deque<AntigenEvent> buffer_;
    std::map<Pid, SignalVector> current_signals_;
};

}  // namespace dangerwatch
