#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dangerwatch/dendritic.hpp"
#include "dangerwatch/random.hpp"

namespace dangerwatch {

inline const std::string kWildcard = "*";

enum class Action { Permit, Deny };

const char* to_string(Action a);

/// Substring required in argument `index` of some event in the matched window.
struct ArgCondition {
    std::size_t index = 0;
    std::string substring;

    friend auto operator<=>(const ArgCondition&, const ArgCondition&) = default;
};

/// T-cell receptor: a generalised syscall n-gram, the condition half of a policy statement.
struct TCR {
    std::vector<std::string> seq_pattern;
    std::optional<ArgCondition> arg_pattern;

    friend auto operator<=>(const TCR&, const TCR&) = default;
};

struct LymphConfig {
    double activation_threshold = 100.0;
    double tolerance_threshold = 100.0;
    std::int64_t naive_lifespan = 50;
    std::size_t naive_per_presentation = 2;
    double wildcard_prob = 0.2;
    double evidence_scale = 100.0;  // CSM value that counts as one unit of evidence

    void validate() const;
};

struct NaiveTCell {
    std::uint64_t id = 0;
    TCR tcr;
    double activation = 0.0;
    double tolerance = 0.0;
    std::int64_t age = 0;
    std::int64_t lifespan = 0;
};

struct EffectorTCell {
    std::uint64_t id = 0;  // inherited from the naive cell; lower means created earlier
    TCR tcr;
    Action action = Action::Permit;
    std::int64_t age = 0;
    std::int64_t lifespan = 0;
    std::uint64_t match_count = 0;
    bool memory = false;
};

/// Builds up to cfg.naive_per_presentation cells from randomly chosen
/// peptides, wildcarding each position with probability wildcard_prob.
/// Candidates whose TCR is already in `live` (or was produced earlier in the
/// same call) are discarded. `next_id` is advanced for every emitted cell.
std::vector<NaiveTCell> generate_naive_tcells(Rng& rng, std::span<const Peptide> peptides, const LymphConfig& cfg,
                                              const std::set<TCR>& live, std::uint64_t& next_id);

bool match_tcr(const TCR& tcr, const Peptide& peptide);

/// Adds the DC's cytokine evidence to every naive cell whose TCR matches at
/// least one carried peptide. Returns the number of cells updated.
std::size_t present(const MigratedDC& mdc, std::span<NaiveTCell> population, const LymphConfig& cfg);

struct Differentiation {
    std::vector<EffectorTCell> effectors;
    std::vector<NaiveTCell> survivors;
    std::vector<NaiveTCell> deleted;
};

/// Ages every cell by one tick, then promotes threshold-crossers to effectors
/// (activation -> Deny, tolerance -> Permit; on a double crossing the larger
/// value/threshold ratio wins and a tie goes to Permit) and deletes cells that
/// reached their lifespan without crossing.
Differentiation age_and_differentiate(std::vector<NaiveTCell> population, const LymphConfig& cfg,
                                      std::int64_t effector_lifespan);

}  // namespace dangerwatch
