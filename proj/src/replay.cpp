#include "dangerwatch/replay.hpp"

#include <fstream>
#include "json.hpp"

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

template <typename Fn>
auto with_file_context(const std::filesystem::path& path, Fn fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        throw e.with_source(path.string());
    }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
}

}  // namespace

std::string format_action_log(std::span<const ActionEvent> actions) {
    std::string out;
    for (const auto& a : actions) {
        nlohmann::ordered_json j;
        j["ts"] = a.timestamp;
        j["pid"] = a.pid;
        j["action"] = to_string(a.action);
        j["statement"] = emit_statement(a.statement);
        out += j.dump();
        out += '\n';
    }
    return out;
}

ReplayResult replay_records(const EngineConfig& cfg, PolicySet base, std::vector<Record> records) {
    Engine engine(cfg, std::move(base));
    RecordBatcher batcher(std::move(records), engine.config().timestamps_per_tick);
    while (auto batch = batcher.next()) engine.tick(*batch);

    ReplayResult result;
    result.report = engine.report();
    result.policy_text = emit_policy(engine.policy());
    result.action_log = format_action_log(engine.action_log());
    result.report_text = result.report.to_text();
    return result;
}

EngineConfig load_config(const std::optional<std::filesystem::path>& path) {
    if (!path) {
        EngineConfig cfg;
        cfg.finalize();
        return cfg;
    }
    auto in = open_input(*path);
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path->string() + ": " + e.what());
    }
}

ReplayResult run_replay(const ReplayInputs& inputs) {
    EngineConfig cfg = load_config(inputs.config);
    if (inputs.seed) cfg.rng_seed = *inputs.seed;

    std::vector<std::string> warnings;
    PolicySet base;
    if (inputs.base_policy) {
        if (std::filesystem::exists(*inputs.base_policy)) {
            auto in = open_input(*inputs.base_policy);
            base = with_file_context(*inputs.base_policy, [&] { return parse_policy(in); });
        } else {
            warnings.push_back("base policy " + inputs.base_policy->string() + " not found; starting from an empty policy");
        }
    }

    auto trace_in = open_input(inputs.trace);
    auto records = with_file_context(inputs.trace, [&] { return read_trace(trace_in); });
    if (inputs.metrics) {
        auto metrics_in = open_input(*inputs.metrics);
        auto metrics = with_file_context(*inputs.metrics, [&] { return read_metrics(metrics_in); });
        records = merge_records(std::move(records), std::move(metrics));
    }

    ReplayResult result = replay_records(cfg, std::move(base), std::move(records));
    result.warnings = std::move(warnings);
    return result;
}

void write_replay_outputs(const ReplayResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "policy.txt", result.policy_text);
    write_file(out_dir / "actions.jsonl", result.action_log);
    write_file(out_dir / "report.txt", result.report_text);
}

}  // namespace dangerwatch
