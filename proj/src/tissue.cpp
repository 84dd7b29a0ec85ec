#include "dangerwatch/tissue.hpp"

#include <string>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

TissueStore::TissueStore(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("tissue capacity must be positive");
}

AntigenId TissueStore::ingest_syscall(AntigenEvent record) {
    if (record.timestamp < clock_) {
        throw InputError("antigen timestamp " + std::to_string(record.timestamp) + " is behind tissue clock " +
                         std::to_string(clock_));
    }
    if (record.syscall.empty()) throw InputError("antigen with empty syscall name");
    record.id = next_id_++;
    buffer_.push_back(std::move(record));
    if (buffer_.size() > capacity_) buffer_.pop_front();
    return buffer_.back().id;
}

void TissueStore::ingest_signals(Pid pid, const SignalVector& sv) { current_signals_[pid] = sv; }

std::vector<AntigenEvent> TissueStore::sample_antigens(Rng& rng, std::size_t n) const {
    std::vector<AntigenEvent> out;
    if (buffer_.empty()) return out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(buffer_[rng.index(buffer_.size())]);
    return out;
}

std::vector<std::vector<AntigenEvent>> TissueStore::sample_fragments(Rng& rng, std::size_t n,
                                                                     std::size_t max_len) const {
    std::vector<std::vector<AntigenEvent>> out;
    if (buffer_.empty() || max_len == 0) return out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t anchor = rng.index(buffer_.size());
        const Pid pid = buffer_[anchor].pid;
        std::vector<AntigenEvent> fragment;
        for (std::size_t j = anchor; j < buffer_.size() && fragment.size() < max_len; ++j) {
            if (buffer_[j].pid == pid) fragment.push_back(buffer_[j]);
        }
        out.push_back(std::move(fragment));
    }
    return out;
}

SignalVector TissueStore::pooled_signals() const {
    SignalVector mean;
    mean.timestamp = clock_;
    if (current_signals_.empty()) return mean;
    for (const auto& [pid, sv] : current_signals_) {
        mean.pamp += sv.pamp;
        mean.danger += sv.danger;
        mean.safe += sv.safe;
        mean.inflammation += sv.inflammation;
    }
    const auto n = static_cast<double>(current_signals_.size());
    mean.pamp /= n;
    mean.danger /= n;
    mean.safe /= n;
    mean.inflammation /= n;
    return mean;
}

}  // namespace dangerwatch
