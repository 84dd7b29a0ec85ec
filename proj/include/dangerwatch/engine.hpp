#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dangerwatch/config.hpp"
#include "dangerwatch/dendritic.hpp"
#include "dangerwatch/lymph.hpp"
#include "dangerwatch/policy.hpp"
#include "dangerwatch/random.hpp"
#include "dangerwatch/response.hpp"
#include "dangerwatch/tissue.hpp"
#include "dangerwatch/trace_io.hpp"

namespace dangerwatch {

/// What happened during one tick. Naive-cell conservation holds per tick:
/// naive_in == effectors_deny + effectors_permit + naive_survivors + naive_deleted.
struct TickSummary {
    Timestep tick = 0;
    std::size_t records = 0;
    std::size_t antigens = 0;
    SignalVector pooled;
    std::size_t migrated_mature = 0;
    std::size_t migrated_semi = 0;
    std::size_t naive_created = 0;
    std::size_t naive_in = 0;  // population entering age_and_differentiate
    std::size_t effectors_deny = 0;
    std::size_t effectors_permit = 0;
    std::size_t naive_survivors = 0;
    std::size_t naive_deleted = 0;
    std::size_t statements_added = 0;
    std::size_t actions_deny = 0;
    std::size_t actions_permit = 0;
    std::size_t memory_promoted = 0;
    std::size_t effectors_died = 0;
};

struct RunReport {
    std::int64_t ticks = 0;
    std::size_t records = 0;
    std::size_t dcs_migrated_mature = 0;
    std::size_t dcs_migrated_semi = 0;
    std::size_t naive_created = 0;
    std::size_t naive_deleted = 0;
    std::size_t effectors_deny = 0;
    std::size_t effectors_permit = 0;
    std::size_t actions_deny = 0;
    std::size_t actions_permit = 0;
    std::size_t memory_cells = 0;
    std::size_t base_statements = 0;
    PolicySet policy;

    friend bool operator==(const RunReport&, const RunReport&) = default;

    std::string to_text() const;
};

/// Activation/tolerance added across the naive population by one presentation.
struct PresentationRecord {
    std::uint64_t dc_id = 0;
    DcContext context = DcContext::SemiMature;
    std::size_t matched_cells = 0;
    double activation_gain = 0.0;
    double tolerance_gain = 0.0;
};

struct EngineObserver {
    std::function<void(const DendriticCell&, const MigratedDC&)> on_migration;
    std::function<void(const PresentationRecord&)> on_presentation;
};

/// The per-tick immune pipeline over one host's trace and metrics.
///
/// Each tick: ingest the batch; derive per-pid signals; every immature DC
/// samples antigen fragments, collects peptides and fuses the host-wide mean
/// signal vector; migrated DCs seed naive T cells and present to the naive
/// pool; naive cells age and differentiate; new effectors are merged into the
/// policy; effectors monitor the batch; effectors retire; migrated DCs are
/// replaced; the clock advances. Everything is driven by one seeded Rng so a
/// (config, inputs) pair fully determines the outputs.
class Engine {
public:
    explicit Engine(EngineConfig cfg, PolicySet base = {});

    TickSummary tick(std::span<const Record> batch);

    /// Adds an effector outside the normal differentiation path (used to
    /// probe monitoring). Its statement is merged like any new effector's.
    void inject_effector(EffectorTCell eff);

    void set_observer(EngineObserver obs) { observer_ = std::move(obs); }
    void set_keep_action_log(bool keep) { keep_action_log_ = keep; }

    RunReport report() const;

    const EngineConfig& config() const noexcept { return cfg_; }
    const TissueStore& tissue() const noexcept { return tissue_; }
    const std::vector<DendriticCell>& dcs() const noexcept { return dcs_; }
    const std::vector<NaiveTCell>& naive() const noexcept { return naive_; }
    const std::vector<EffectorTCell>& effectors() const noexcept { return effectors_; }
    const PolicySet& policy() const noexcept { return policy_; }
    const std::vector<ActionEvent>& action_log() const noexcept { return action_log_; }

private:
    struct PidState {
        std::optional<MetricSample> last_metric;
        ProcessSignals behaviour{0.0, kMaxConcentration};
        std::deque<std::pair<Timestep, std::int64_t>> violations;  // (tick, count)
        std::deque<AntigenEvent> recent;                            // monitoring context
    };

    void ingest(std::span<const Record> batch, std::vector<AntigenEvent>& antigens, std::set<Pid>& active);
    void derive_signals(const std::set<Pid>& active, Timestep now);
    std::vector<MigratedDC> run_dendritic_cells(bool sample_antigen, TickSummary& summary);
    void run_lymph(std::vector<MigratedDC>& migrated, TickSummary& summary);
    void merge_effector_statements(std::span<const EffectorTCell> fresh, TickSummary& summary);
    void run_monitoring(const std::vector<AntigenEvent>& antigens, TickSummary& summary);
    void run_retirement(TickSummary& summary);

    EngineConfig cfg_;
    Rng rng_;
    TissueStore tissue_;
    std::vector<DendriticCell> dcs_;
    std::uint64_t next_dc_id_ = 0;
    std::vector<NaiveTCell> naive_;
    std::uint64_t next_tcell_id_ = 0;
    std::vector<EffectorTCell> effectors_;  // sorted by id
    EffectorIndex effector_index_;
    std::set<TCR> live_tcrs_;
    PolicySet policy_;
    std::unordered_set<std::string> policy_keys_;  // canonical text of every statement in policy_
    std::size_t base_statements_ = 0;
    std::map<Pid, PidState> pids_;
    std::optional<HostSample> host_;
    std::vector<ActionEvent> action_log_;
    bool keep_action_log_ = true;
    EngineObserver observer_;
    RunReport totals_;
};

/// Groups time-ordered records into ticks of `timestamps_per_tick` distinct
/// timestamps each.
class RecordBatcher {
public:
    RecordBatcher(std::vector<Record> records, std::size_t timestamps_per_tick);

    /// Next tick's records, or nullopt once the input is exhausted.
    std::optional<std::vector<Record>> next();

private:
    std::vector<Record> records_;
    std::size_t per_tick_;
    std::size_t pos_ = 0;
};

/// Stable merge of two time-ordered record streams (ties keep `a` first).
std::vector<Record> merge_records(std::vector<Record> a, std::vector<Record> b);

}  // namespace dangerwatch
