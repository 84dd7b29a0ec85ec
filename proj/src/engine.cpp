#include "dangerwatch/engine.hpp"

#include <algorithm>
#include <sstream>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

constexpr std::size_t kMonitorContext = kMaxNgramLength - 1;

}  // namespace

Engine::Engine(EngineConfig cfg, PolicySet base)
    : cfg_(std::move(cfg)), rng_(cfg_.rng_seed), tissue_(cfg_.tissue_capacity), policy_(std::move(base)) {
    cfg_.finalize();
    base_statements_ = policy_.statements.size();
    for (const auto& st : policy_.statements) policy_keys_.insert(emit_statement(st));
    dcs_.reserve(cfg_.dc_population_size);
    for (std::size_t i = 0; i < cfg_.dc_population_size; ++i) dcs_.push_back(new_dc(rng_, cfg_.dc, next_dc_id_++));
}

TickSummary Engine::tick(std::span<const Record> batch) {
    TickSummary summary;
    summary.tick = tissue_.clock();
    summary.records = batch.size();

    std::vector<AntigenEvent> antigens;
    std::set<Pid> active;
    ingest(batch, antigens, active);
    summary.antigens = antigens.size();

    derive_signals(active, summary.tick);
    summary.pooled = tissue_.pooled_signals();

    auto migrated = run_dendritic_cells(!antigens.empty(), summary);
    run_lymph(migrated, summary);
    run_monitoring(antigens, summary);
    run_retirement(summary);

    for (auto& dc : dcs_) {
        if (dc.state() == DcState::Migrated) dc = new_dc(rng_, cfg_.dc, next_dc_id_++);
    }
    tissue_.advance();

    ++totals_.ticks;
    totals_.records += summary.records;
    totals_.dcs_migrated_mature += summary.migrated_mature;
    totals_.dcs_migrated_semi += summary.migrated_semi;
    totals_.naive_created += summary.naive_created;
    totals_.naive_deleted += summary.naive_deleted;
    totals_.effectors_deny += summary.effectors_deny;
    totals_.effectors_permit += summary.effectors_permit;
    totals_.actions_deny += summary.actions_deny;
    totals_.actions_permit += summary.actions_permit;
    totals_.memory_cells += summary.memory_promoted;
    return summary;
}

void Engine::ingest(std::span<const Record> batch, std::vector<AntigenEvent>& antigens, std::set<Pid>& active) {
    for (const auto& record : batch) {
        if (const auto* ev = std::get_if<AntigenEvent>(&record)) {
            AntigenEvent copy = *ev;
            copy.id = tissue_.ingest_syscall(copy);
            active.insert(copy.pid);
            if (copy.violation) {
                auto& v = pids_[copy.pid].violations;
                if (v.empty() || v.back().first != tissue_.clock()) v.emplace_back(tissue_.clock(), 0);
                ++v.back().second;
            }
            antigens.push_back(std::move(copy));
        } else if (const auto* m = std::get_if<MetricSample>(&record)) {
            PidState& st = pids_[m->pid];
            if (st.last_metric) st.behaviour = derive_process_signals(*st.last_metric, *m, cfg_.signals);
            st.last_metric = *m;
            active.insert(m->pid);
        } else {
            host_ = std::get<HostSample>(record);
        }
    }
}

void Engine::derive_signals(const std::set<Pid>& active, Timestep now) {
    tissue_.clear_signals();
    const double inflammation = host_ ? derive_inflammation(*host_) : 0.0;
    for (const Pid pid : active) {
        PidState& st = pids_[pid];
        while (!st.violations.empty() && st.violations.front().first <= now - cfg_.signals.window) {
            st.violations.pop_front();
        }
        std::int64_t count = 0;
        for (const auto& [tick, n] : st.violations) count += n;
        tissue_.ingest_signals(pid, build_signal_vector(derive_pamp(count, cfg_.signals), st.behaviour.danger,
                                                        st.behaviour.safe, inflammation, now));
    }
}

std::vector<MigratedDC> Engine::run_dendritic_cells(bool sample_antigen, TickSummary& summary) {
    const bool have_signals = !tissue_.current_signals().empty();
    const SignalVector pooled = summary.pooled;
    const std::size_t max_len = cfg_.dc.max_ngram_length();

    std::vector<MigratedDC> migrated;
    for (auto& dc : dcs_) {
        if (sample_antigen) {
            for (const auto& fragment : tissue_.sample_fragments(rng_, cfg_.dc.antigens_per_sample, max_len)) {
                dc.collect_antigen(extract_peptides(fragment, cfg_.dc, rng_));
            }
        }
        if (have_signals) dc.process_signals(pooled, cfg_.weights);
        if (auto m = dc.check_migration()) {
            (m->context == DcContext::Mature ? summary.migrated_mature : summary.migrated_semi)++;
            if (observer_.on_migration) observer_.on_migration(dc, *m);
            migrated.push_back(std::move(*m));
        }
    }
    return migrated;
}

void Engine::run_lymph(std::vector<MigratedDC>& migrated, TickSummary& summary) {
    for (const auto& mdc : migrated) {
        auto fresh = generate_naive_tcells(rng_, mdc.peptides, cfg_.lymph, live_tcrs_, next_tcell_id_);
        summary.naive_created += fresh.size();
        for (auto& cell : fresh) {
            live_tcrs_.insert(cell.tcr);
            naive_.push_back(std::move(cell));
        }

        if (observer_.on_presentation) {
            double act_before = 0.0;
            double tol_before = 0.0;
            for (const auto& c : naive_) {
                act_before += c.activation;
                tol_before += c.tolerance;
            }
            PresentationRecord rec{mdc.dc_id, mdc.context, present(mdc, naive_, cfg_.lymph), 0.0, 0.0};
            for (const auto& c : naive_) {
                rec.activation_gain += c.activation;
                rec.tolerance_gain += c.tolerance;
            }
            rec.activation_gain -= act_before;
            rec.tolerance_gain -= tol_before;
            observer_.on_presentation(rec);
        } else {
            present(mdc, naive_, cfg_.lymph);
        }
    }

    summary.naive_in = naive_.size();
    auto diff = age_and_differentiate(std::move(naive_), cfg_.lymph, cfg_.response.effector_lifespan);
    naive_ = std::move(diff.survivors);
    summary.naive_survivors = naive_.size();
    summary.naive_deleted = diff.deleted.size();
    for (const auto& cell : diff.deleted) live_tcrs_.erase(cell.tcr);
    for (const auto& eff : diff.effectors) (eff.action == Action::Deny ? summary.effectors_deny : summary.effectors_permit)++;

    merge_effector_statements(diff.effectors, summary);
    const auto by_id = [](const EffectorTCell& a, const EffectorTCell& b) { return a.id < b.id; };
    std::sort(diff.effectors.begin(), diff.effectors.end(), by_id);
    const auto mid = static_cast<std::ptrdiff_t>(effectors_.size());
    for (auto& eff : diff.effectors) {
        effector_index_.add(eff.id, eff.tcr);
        effectors_.push_back(std::move(eff));
    }
    std::inplace_merge(effectors_.begin(), effectors_.begin() + mid, effectors_.end(), by_id);
}

void Engine::merge_effector_statements(std::span<const EffectorTCell> fresh, TickSummary& summary) {
    // Same result as merge_policies, without copying the policy every tick.
    for (const auto& eff : fresh) {
        auto st = effector_to_policy(eff);
        if (policy_keys_.insert(emit_statement(st)).second) {
            policy_.statements.push_back(std::move(st));
            ++summary.statements_added;
        }
    }
}

void Engine::inject_effector(EffectorTCell eff) {
    validate_statement(effector_to_policy(eff));
    if (std::any_of(effectors_.begin(), effectors_.end(), [&](const EffectorTCell& e) { return e.id == eff.id; })) {
        throw StateError("effector id " + std::to_string(eff.id) + " is already live");
    }
    TickSummary ignored;
    merge_effector_statements(std::span<const EffectorTCell>(&eff, 1), ignored);
    live_tcrs_.insert(eff.tcr);
    const auto pos = std::upper_bound(effectors_.begin(), effectors_.end(), eff.id,
                                      [](std::uint64_t id, const EffectorTCell& e) { return id < e.id; });
    effector_index_.add(eff.id, eff.tcr);
    effectors_.insert(pos, std::move(eff));
}

void Engine::run_monitoring(const std::vector<AntigenEvent>& antigens, TickSummary& summary) {
    if (antigens.empty()) return;
    std::vector<AntigenEvent> window;
    std::set<Pid> seen;
    for (const auto& ev : antigens) {
        if (!seen.insert(ev.pid).second) continue;
        const auto& recent = pids_[ev.pid].recent;
        window.insert(window.end(), recent.begin(), recent.end());
    }
    const std::size_t first_new = window.size();
    window.insert(window.end(), antigens.begin(), antigens.end());

    auto actions = monitor(effectors_, effector_index_, window, first_new);
    for (const auto& a : actions) (a.action == Action::Deny ? summary.actions_deny : summary.actions_permit)++;
    if (keep_action_log_) {
        action_log_.insert(action_log_.end(), std::make_move_iterator(actions.begin()),
                           std::make_move_iterator(actions.end()));
    }

    for (const auto& ev : antigens) {
        auto& recent = pids_[ev.pid].recent;
        recent.push_back(ev);
        if (recent.size() > kMonitorContext) recent.pop_front();
    }
}

void Engine::run_retirement(TickSummary& summary) {
    auto retired = retire_effectors(std::move(effectors_), cfg_.response);
    summary.memory_promoted = retired.memory.size();
    summary.effectors_died = retired.dead.size();
    for (const auto& eff : retired.dead) {
        live_tcrs_.erase(eff.tcr);
        effector_index_.remove(eff.id, eff.tcr);
    }

    // Keep creation order so monitoring attribution stays stable. Survivors
    // are already in id order; only the new memory cells need placing.
    const auto by_id = [](const EffectorTCell& a, const EffectorTCell& b) { return a.id < b.id; };
    effectors_ = std::move(retired.survivors);
    std::sort(retired.memory.begin(), retired.memory.end(), by_id);
    const auto mid = static_cast<std::ptrdiff_t>(effectors_.size());
    effectors_.insert(effectors_.end(), std::make_move_iterator(retired.memory.begin()),
                      std::make_move_iterator(retired.memory.end()));
    std::inplace_merge(effectors_.begin(), effectors_.begin() + mid, effectors_.end(), by_id);
}

RunReport Engine::report() const {
    RunReport r = totals_;
    r.base_statements = base_statements_;
    r.policy = policy_;
    return r;
}

std::string RunReport::to_text() const {
    std::size_t deny_statements = 0;
    for (const auto& st : policy.statements) deny_statements += st.action == Action::Deny ? 1 : 0;
    std::ostringstream os;
    os << "ticks executed:        " << ticks << "\n"
       << "records ingested:      " << records << "\n"
       << "DCs migrated:          " << dcs_migrated_mature + dcs_migrated_semi << " (mature " << dcs_migrated_mature
       << ", semi-mature " << dcs_migrated_semi << ")\n"
       << "naive T cells:         created " << naive_created << ", deleted " << naive_deleted << "\n"
       << "effector T cells:      deny " << effectors_deny << ", permit " << effectors_permit << ", memory "
       << memory_cells << "\n"
       << "action events:         deny " << actions_deny << ", permit " << actions_permit << "\n"
       << "policy statements:     " << policy.statements.size() << " (base " << base_statements << ", learned "
       << policy.statements.size() - base_statements << ", deny " << deny_statements << ")\n"
       << "default action:        " << to_string(policy.default_action) << "\n";
    return os.str();
}

RecordBatcher::RecordBatcher(std::vector<Record> records, std::size_t timestamps_per_tick)
    : records_(std::move(records)), per_tick_(timestamps_per_tick) {
    if (per_tick_ == 0) throw ConfigError("timestamps_per_tick must be positive");
}

std::optional<std::vector<Record>> RecordBatcher::next() {
    if (pos_ >= records_.size()) return std::nullopt;
    std::vector<Record> batch;
    std::size_t distinct = 0;
    Timestep current = 0;
    while (pos_ < records_.size()) {
        const Timestep ts = record_timestamp(records_[pos_]);
        if (distinct == 0 || ts != current) {
            if (distinct == per_tick_) break;
            ++distinct;
            current = ts;
        }
        batch.push_back(records_[pos_++]);
    }
    return batch;
}

std::vector<Record> merge_records(std::vector<Record> a, std::vector<Record> b) {
    std::vector<Record> out;
    out.reserve(a.size() + b.size());
    std::merge(std::make_move_iterator(a.begin()), std::make_move_iterator(a.end()), std::make_move_iterator(b.begin()),
               std::make_move_iterator(b.end()), std::back_inserter(out),
               [](const Record& x, const Record& y) { return record_timestamp(x) < record_timestamp(y); });
    return out;
}

}  // namespace dangerwatch
