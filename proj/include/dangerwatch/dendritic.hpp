#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dangerwatch/random.hpp"
#include "dangerwatch/signals.hpp"
#include "dangerwatch/tissue.hpp"

namespace dangerwatch {

// Signal-to-cytokine weights. The mature row subtracts the safe term.
struct WeightMatrix {
    struct Csm {
        double pamp = 2.0;
        double danger = 1.0;
        double safe = 1.0;
    } csm;
    struct Mature {
        double pamp = 2.0;
        double danger = 1.0;
        double safe_suppression = 1.5;
    } mature;
    struct Semi {
        double safe = 1.0;
    } semi;

    void validate() const;
};

struct DcConfig {
    double threshold_lo = 50.0;
    double threshold_hi = 150.0;
    std::size_t peptide_capacity = 64;
    std::size_t peptides_per_collection = 8;
    std::size_t antigens_per_sample = 4;
    std::vector<std::size_t> ngram_lengths{3, 5, 7};

    void validate() const;
    std::size_t max_ngram_length() const;
    /// Midpoint of the migration-threshold range; normalises CSM into an evidence factor.
    double evidence_scale() const { return 0.5 * (threshold_lo + threshold_hi); }
};

inline constexpr std::size_t kMinNgramLength = 2;
inline constexpr std::size_t kMaxNgramLength = 8;

/// Antigen fragment presented to T cells: a syscall n-gram and optionally a
/// path-like prefix of the first argument seen in the window.
struct Peptide {
    std::vector<std::string> syscall_ngram;
    std::optional<std::string> arg_fragment;
    std::set<Pid> source_pids;

    friend bool operator==(const Peptide&, const Peptide&) = default;
};

enum class DcState { Immature, Migrated };
enum class DcContext { Mature, SemiMature };

const char* to_string(DcContext ctx);

struct MigratedDC {
    std::uint64_t dc_id = 0;
    DcContext context = DcContext::SemiMature;
    double csm = 0.0;
    double semi = 0.0;
    double mat = 0.0;
    std::vector<Peptide> peptides;
};

DcContext context_of(double mat, double semi);

class DendriticCell {
public:
    DendriticCell(std::uint64_t id, double migration_threshold, std::size_t peptide_capacity);

    /// Fuses one signal vector into the three accumulators. StateError once migrated.
    void process_signals(const SignalVector& sv, const WeightMatrix& w);

    /// Appends peptides until the store is full; the overflow is dropped.
    void collect_antigen(std::span<const Peptide> peptides);

    /// Migrates the cell when csm has reached its threshold (inclusive).
    std::optional<MigratedDC> check_migration();

    DcContext context() const { return context_of(mat_, semi_); }

    std::uint64_t id() const noexcept { return id_; }
    DcState state() const noexcept { return state_; }
    double csm() const noexcept { return csm_; }
    double semi() const noexcept { return semi_; }
    double mat() const noexcept { return mat_; }
    double migration_threshold() const noexcept { return threshold_; }
    std::size_t peptide_capacity() const noexcept { return capacity_; }
    const std::vector<Peptide>& peptides() const noexcept { return peptides_; }

private:
    std::uint64_t id_;
    DcState state_ = DcState::Immature;
    double csm_ = 0.0;
    double semi_ = 0.0;
    double mat_ = 0.0;
    double threshold_;
    std::size_t capacity_;
    std::vector<Peptide> peptides_;
};

/// Fresh immature cell with threshold drawn uniformly from the configured range.
DendriticCell new_dc(Rng& rng, const DcConfig& cfg, std::uint64_t id = 0);

/// Prefix of `arg` up to and including its final '/', or the whole argument
/// when it has none. Empty input gives nullopt.
std::optional<std::string> arg_fragment_of(const std::string& arg);

/// Sliding-window n-grams over each pid's syscall sequence, for every
/// configured length, then a random subset of at most
/// cfg.peptides_per_collection of them (kept in candidate order).
std::vector<Peptide> extract_peptides(std::span<const AntigenEvent> events, const DcConfig& cfg, Rng& rng);

}  // namespace dangerwatch
