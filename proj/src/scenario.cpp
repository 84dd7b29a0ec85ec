#include "dangerwatch/scenario.hpp"

#include <array>
#include <fstream>
#include <utility>

#include "dangerwatch/error.hpp"
#include "dangerwatch/random.hpp"

namespace dangerwatch {

namespace {

using Call = std::pair<const char*, const char*>;  // syscall, first argument

const std::array<std::vector<Call>, 4> kRequestTemplates{{
    {{"accept", "3"}, {"read", "4"}, {"open", "/var/www/html/index.html"}, {"fstat", "5"}, {"read", "5"},
     {"close", "5"}, {"write", "4"}, {"close", "4"}},
    {{"accept", "3"}, {"read", "4"}, {"stat", "/var/www/html/img/logo.png"}, {"open", "/var/www/html/img/logo.png"},
     {"mmap", "0"}, {"write", "4"}, {"munmap", "0"}, {"close", "5"}, {"close", "4"}},
    {{"accept", "3"}, {"read", "4"}, {"open", "/etc/app/config.json"}, {"read", "5"}, {"close", "5"},
     {"write", "4"}, {"close", "4"}},
    {{"poll", "3"}, {"read", "4"}, {"write", "4"}},
}};

const std::array<Call, 3> kInjected{{{"mprotect", "0x7f3a2c000000"}, {"dup2", "4"}, {"execve", "/bin/sh"}}};

AntigenEvent call_event(Timestep ts, Pid pid, const Call& call, bool violation) {
    AntigenEvent ev;
    ev.timestamp = ts;
    ev.pid = pid;
    ev.syscall = call.first;
    if (call.second[0] != '\0') ev.args.emplace_back(call.second);
    ev.violation = violation;
    return ev;
}

}  // namespace

ScenarioKind parse_scenario_kind(const std::string& name) {
    if (name == "benign") return ScenarioKind::Benign;
    if (name == "attack") return ScenarioKind::Attack;
    throw InputError("unknown scenario '" + name + "' (expected benign or attack)");
}

Scenario generate_scenario(const ScenarioParams& params) {
    if (params.ticks < 0 || params.burst_length < 0 || params.attack_reps_per_tick < 1) {
        throw InputError("scenario sizes must be nonnegative and attack_reps_per_tick >= 1");
    }
    Rng rng(params.seed);
    Scenario out;
    const bool attack = params.kind == ScenarioKind::Attack;
    if (attack) {
        for (const auto& c : kInjected) {
            out.injected_ngram.emplace_back(c.first);
            out.injected_args.emplace_back(c.second);
        }
    }

    bool spike_high = false;
    for (std::int64_t t = 0; t < params.ticks; ++t) {
        const Timestep ts = params.first_timestamp + t;
        const bool in_burst = attack && t >= params.burst_start && t < params.burst_start + params.burst_length;

        // Server: one or two requests, then the injected calls during a burst.
        const int requests = 1 + static_cast<int>(rng.index(2));
        for (int r = 0; r < requests; ++r) {
            for (const auto& call : kRequestTemplates[rng.index(kRequestTemplates.size())]) {
                out.trace.emplace_back(call_event(ts, kScenarioServerPid, call, false));
            }
        }
        if (in_burst) {
            for (int rep = 0; rep < params.attack_reps_per_tick; ++rep) {
                for (const auto& call : kInjected) out.trace.emplace_back(call_event(ts, kScenarioServerPid, call, true));
            }
        }

        // Logger.
        out.trace.emplace_back(call_event(ts, kScenarioLoggerPid, {"gettimeofday", ""}, false));
        out.trace.emplace_back(call_event(ts, kScenarioLoggerPid, {"write", "6"}, false));
        if (rng.bernoulli(0.3)) out.trace.emplace_back(call_event(ts, kScenarioLoggerPid, {"fsync", "6"}, false));

        MetricSample server{ts, kScenarioServerPid, 12.0 + rng.uniform(-1.0, 1.0), 48000.0 + rng.uniform(-100.0, 100.0)};
        MetricSample logger{ts, kScenarioLoggerPid, 2.0 + rng.uniform(-0.5, 0.5), 8000.0 + rng.uniform(-50.0, 50.0)};
        HostSample host{ts, 0.8 + rng.uniform(-0.1, 0.1), 4};
        if (in_burst) {
            spike_high = !spike_high;
            server.cpu_pct = spike_high ? 90.0 + rng.uniform(0.0, 5.0) : 5.0 + rng.uniform(0.0, 2.0);
            server.mem_kb = spike_high ? 110000.0 + rng.uniform(0.0, 5000.0) : 48000.0;
            host.load_avg = 3.5 + rng.uniform(0.0, 0.5);
        }
        out.metrics.emplace_back(server);
        out.metrics.emplace_back(logger);
        out.metrics.emplace_back(host);
    }
    return out;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream trace(out_dir / "trace.tsv", std::ios::binary);
    std::ofstream metrics(out_dir / "metrics.tsv", std::ios::binary);
    if (!trace || !metrics) throw InputError("cannot write scenario files under " + out_dir.string());
    for (const auto& r : scenario.trace) trace << format_trace_line(r) << '\n';
    for (const auto& r : scenario.metrics) {
        if (const auto* m = std::get_if<MetricSample>(&r)) {
            metrics << format_metrics_line(*m) << '\n';
        } else {
            metrics << format_metrics_line(std::get<HostSample>(r)) << '\n';
        }
    }
}

}  // namespace dangerwatch
