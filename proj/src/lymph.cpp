#include "dangerwatch/lymph.hpp"

#include <algorithm>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

constexpr int kMaxWildcardRerolls = 16;

TCR generalise(Rng& rng, const Peptide& peptide, double wildcard_prob) {
    const auto& ngram = peptide.syscall_ngram;
    TCR tcr;
    tcr.seq_pattern = ngram;
    for (int attempt = 0;; ++attempt) {
        bool any_concrete = false;
        for (std::size_t i = 0; i < ngram.size(); ++i) {
            const bool wild = rng.bernoulli(wildcard_prob);
            tcr.seq_pattern[i] = wild ? kWildcard : ngram[i];
            any_concrete = any_concrete || !wild;
        }
        if (any_concrete) break;
        if (attempt + 1 == kMaxWildcardRerolls) {
            // Re-rolling cannot terminate when wildcard_prob is 1; restore one position instead.
            const std::size_t keep = rng.index(ngram.size());
            tcr.seq_pattern[keep] = ngram[keep];
            break;
        }
    }
    if (peptide.arg_fragment && !peptide.arg_fragment->empty()) {
        tcr.arg_pattern = ArgCondition{0, *peptide.arg_fragment};
    }
    return tcr;
}

}  // namespace

const char* to_string(Action a) { return a == Action::Deny ? "deny" : "permit"; }

void LymphConfig::validate() const {
    if (!(activation_threshold > 0.0) || !(tolerance_threshold > 0.0)) {
        throw ConfigError("activation and tolerance thresholds must be positive");
    }
    if (naive_lifespan < 1) throw ConfigError("naive lifespan must be at least 1");
    if (!(wildcard_prob >= 0.0 && wildcard_prob <= 1.0)) throw ConfigError("wildcard_prob must lie in [0, 1]");
    if (!(evidence_scale > 0.0)) throw ConfigError("evidence scale must be positive");
}

std::vector<NaiveTCell> generate_naive_tcells(Rng& rng, std::span<const Peptide> peptides, const LymphConfig& cfg,
                                              const std::set<TCR>& live, std::uint64_t& next_id) {
    std::vector<NaiveTCell> out;
    if (peptides.empty()) return out;
    std::set<TCR> fresh;
    for (std::size_t i = 0; i < cfg.naive_per_presentation; ++i) {
        const Peptide& source = peptides[rng.index(peptides.size())];
        if (source.syscall_ngram.empty()) continue;
        TCR tcr = generalise(rng, source, cfg.wildcard_prob);
        if (live.contains(tcr) || !fresh.insert(tcr).second) continue;
        out.push_back(NaiveTCell{next_id++, std::move(tcr), 0.0, 0.0, 0, cfg.naive_lifespan});
    }
    return out;
}

bool match_tcr(const TCR& tcr, const Peptide& peptide) {
    if (tcr.seq_pattern.size() != peptide.syscall_ngram.size()) return false;
    for (std::size_t i = 0; i < tcr.seq_pattern.size(); ++i) {
        const auto& item = tcr.seq_pattern[i];
        if (item != kWildcard && item != peptide.syscall_ngram[i]) return false;
    }
    if (tcr.arg_pattern) {
        if (!peptide.arg_fragment) return false;
        if (peptide.arg_fragment->find(tcr.arg_pattern->substring) == std::string::npos) return false;
    }
    return true;
}

std::size_t present(const MigratedDC& mdc, std::span<NaiveTCell> population, const LymphConfig& cfg) {
    const double evidence = mdc.csm / cfg.evidence_scale;
    std::size_t updated = 0;
    for (auto& cell : population) {
        const bool hit = std::any_of(mdc.peptides.begin(), mdc.peptides.end(),
                                     [&](const Peptide& p) { return match_tcr(cell.tcr, p); });
        if (!hit) continue;
        if (mdc.context == DcContext::Mature) {
            cell.activation += evidence * mdc.mat;
        } else {
            cell.tolerance += evidence * mdc.semi;
        }
        ++updated;
    }
    return updated;
}

Differentiation age_and_differentiate(std::vector<NaiveTCell> population, const LymphConfig& cfg,
                                      std::int64_t effector_lifespan) {
    Differentiation result;
    for (auto& cell : population) {
        ++cell.age;
        const double act_ratio = cell.activation / cfg.activation_threshold;
        const double tol_ratio = cell.tolerance / cfg.tolerance_threshold;
        const bool activated = act_ratio >= 1.0;
        const bool tolerised = tol_ratio >= 1.0;
        if (activated || tolerised) {
            const Action action = (activated && (!tolerised || act_ratio > tol_ratio)) ? Action::Deny : Action::Permit;
            result.effectors.push_back(EffectorTCell{cell.id, std::move(cell.tcr), action, 0, effector_lifespan, 0, false});
        } else if (cell.age >= cell.lifespan) {
            result.deleted.push_back(std::move(cell));
        } else {
            result.survivors.push_back(std::move(cell));
        }
    }
    return result;
}

}  // namespace dangerwatch
