#include "dangerwatch/dendritic.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

void WeightMatrix::validate() const {
    if (csm.pamp < 0 || csm.danger < 0 || csm.safe < 0) throw ConfigError("csm weights must be nonnegative");
    if (mature.safe_suppression < 0) throw ConfigError("mature safe-suppression weight must be nonnegative");
    if (semi.safe < 0) throw ConfigError("semi-mature safe weight must be nonnegative");
}

void DcConfig::validate() const {
    if (!(threshold_lo > 0.0)) throw ConfigError("migration threshold lower bound must be positive");
    if (threshold_lo > threshold_hi) throw ConfigError("migration threshold range is inverted");
    if (peptide_capacity == 0) throw ConfigError("peptide capacity must be positive");
    if (ngram_lengths.empty()) throw ConfigError("at least one n-gram length is required");
    for (auto len : ngram_lengths) {
        if (len < kMinNgramLength || len > kMaxNgramLength) throw ConfigError("n-gram lengths must lie in 2..8");
    }
}

std::size_t DcConfig::max_ngram_length() const {
    return ngram_lengths.empty() ? 0 : *std::max_element(ngram_lengths.begin(), ngram_lengths.end());
}

const char* to_string(DcContext ctx) { return ctx == DcContext::Mature ? "mature" : "semi-mature"; }

DcContext context_of(double mat, double semi) { return mat > semi ? DcContext::Mature : DcContext::SemiMature; }

DendriticCell::DendriticCell(std::uint64_t id, double migration_threshold, std::size_t peptide_capacity)
    : id_(id), threshold_(migration_threshold), capacity_(peptide_capacity) {
    if (!(threshold_ > 0.0)) throw ConfigError("migration threshold must be positive");
}

void DendriticCell::process_signals(const SignalVector& sv, const WeightMatrix& w) {
    if (state_ == DcState::Migrated) throw StateError("dendritic cell " + std::to_string(id_) + " already migrated");
    const double amp = 1.0 + sv.inflammation / kMaxConcentration;
    csm_ += amp * (w.csm.pamp * sv.pamp + w.csm.danger * sv.danger + w.csm.safe * sv.safe);
    mat_ += amp * (w.mature.pamp * sv.pamp + w.mature.danger * sv.danger - w.mature.safe_suppression * sv.safe);
    mat_ = std::max(0.0, mat_);
    semi_ += amp * (w.semi.safe * sv.safe);
}

void DendriticCell::collect_antigen(std::span<const Peptide> peptides) {
    if (state_ == DcState::Migrated) throw StateError("dendritic cell " + std::to_string(id_) + " already migrated");
    for (const auto& p : peptides) {
        if (peptides_.size() >= capacity_) break;
        peptides_.push_back(p);
    }
}

std::optional<MigratedDC> DendriticCell::check_migration() {
    if (state_ == DcState::Migrated || csm_ < threshold_) return std::nullopt;
    state_ = DcState::Migrated;
    return MigratedDC{id_, context(), csm_, semi_, mat_, peptides_};
}

DendriticCell new_dc(Rng& rng, const DcConfig& cfg, std::uint64_t id) {
    if (cfg.threshold_lo > cfg.threshold_hi) throw ConfigError("migration threshold range is inverted");
    return DendriticCell(id, rng.uniform(cfg.threshold_lo, cfg.threshold_hi), cfg.peptide_capacity);
}

std::optional<std::string> arg_fragment_of(const std::string& arg) {
    if (arg.empty()) return std::nullopt;
    const auto slash = arg.rfind('/');
    if (slash == std::string::npos) return arg;
    return arg.substr(0, slash + 1);
}

std::vector<Peptide> extract_peptides(std::span<const AntigenEvent> events, const DcConfig& cfg, Rng& rng) {
    std::map<Pid, std::vector<const AntigenEvent*>> by_pid;
    for (const auto& ev : events) by_pid[ev.pid].push_back(&ev);

    std::vector<Peptide> candidates;
    for (const auto len : cfg.ngram_lengths) {
        for (const auto& [pid, seq] : by_pid) {
            if (seq.size() < len) continue;
            for (std::size_t start = 0; start + len <= seq.size(); ++start) {
                Peptide p;
                p.source_pids.insert(pid);
                p.syscall_ngram.reserve(len);
                for (std::size_t k = start; k < start + len; ++k) {
                    const AntigenEvent& ev = *seq[k];
                    p.syscall_ngram.push_back(ev.syscall);
                    if (!p.arg_fragment && !ev.args.empty()) p.arg_fragment = arg_fragment_of(ev.args.front());
                }
                candidates.push_back(std::move(p));
            }
        }
    }

    const std::size_t keep = std::min(cfg.peptides_per_collection, candidates.size());
    if (keep == candidates.size()) return candidates;

    // Partial Fisher-Yates over indices, then restore candidate order.
    std::vector<std::size_t> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < keep; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());

    std::vector<Peptide> out;
    out.reserve(keep);
    for (auto i : idx) out.push_back(std::move(candidates[i]));
    return out;
}

}  // namespace dangerwatch
