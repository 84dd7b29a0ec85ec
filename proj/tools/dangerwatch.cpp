// dangerwatch: replay syscall traces through the immune pipeline and emit
// permit/deny policy statements.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dangerwatch/config.hpp"
#include "dangerwatch/error.hpp"
#include "dangerwatch/policy.hpp"
#include "dangerwatch/replay.hpp"
#include "dangerwatch/scenario.hpp"
#include "dangerwatch/trace_io.hpp"

namespace dw = dangerwatch;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool quiet = false;

    std::string trace;
    std::string metrics;
    std::string base_policy;

    std::string input = "-";
    double tick_seconds = 1.0;

    std::string policy;

    std::string kind;
    std::int64_t ticks = 500;
    std::int64_t burst_start = 300;
    std::int64_t burst_length = 20;
    int attack_reps = 3;
};

std::optional<std::filesystem::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

int cmd_run(const Options& o) {
    dw::ReplayInputs in;
    in.trace = o.trace;
    in.metrics = opt_path(o.metrics);
    in.base_policy = opt_path(o.base_policy);
    in.config = opt_path(o.config);
    in.seed = o.seed;
    const auto result = dw::run_replay(in);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    dw::write_replay_outputs(result, o.out_dir);
    if (!o.quiet) {
        std::cout << result.report_text;
        std::cout << "outputs written to " << o.out_dir << "\n";
    }
    return 0;
}

int cmd_adapt(const Options& o) {
    dw::StraceConversion conv;
    if (o.input == "-") {
        conv = dw::adapt_strace(std::cin, o.tick_seconds);
    } else {
        std::ifstream in(o.input);
        if (!in) throw dw::InputError("cannot open " + o.input);
        conv = dw::adapt_strace(in, o.tick_seconds);
    }
    for (const auto& line : conv.lines) std::cout << line << '\n';
    if (!o.quiet && conv.skipped > 0) std::cerr << "warning: skipped " << conv.skipped << " unparseable line(s)\n";
    return 0;
}

int cmd_check_policy(const Options& o) {
    std::ifstream in(o.policy);
    if (!in) throw dw::InputError("cannot open " + o.policy);
    dw::PolicySet set;
    try {
        set = dw::parse_policy(in);
    } catch (const dw::ParseError& e) {
        throw e.with_source(o.policy);
    }
    for (const auto& st : set.statements) dw::validate_statement(st);
    if (!o.quiet) {
        std::cout << dw::emit_policy(set);
        std::cerr << o.policy << ": " << set.statements.size() << " statement(s), default "
                  << dw::to_string(set.default_action) << "\n";
    }
    return 0;
}

int cmd_gen_scenario(const Options& o) {
    dw::ScenarioParams p;
    p.kind = dw::parse_scenario_kind(o.kind);
    p.ticks = o.ticks;
    p.seed = o.seed.value_or(42);
    p.burst_start = o.burst_start;
    p.burst_length = o.burst_length;
    p.attack_reps_per_tick = o.attack_reps;
    const auto scenario = dw::generate_scenario(p);
    dw::write_scenario(scenario, o.out_dir);
    if (!o.quiet) {
        std::cout << "wrote " << scenario.trace.size() << " syscall and " << scenario.metrics.size()
                  << " metric records to " << o.out_dir << "\n";
        if (!scenario.injected_ngram.empty()) {
            std::cout << "injected 3-gram:";
            for (const auto& s : scenario.injected_ngram) std::cout << ' ' << s;
            std::cout << " (ticks " << p.burst_start << ".." << p.burst_start + p.burst_length - 1 << ")\n";
        }
    }
    return 0;
}

int cmd_show_config(const Options& o) {
    std::cout << dw::config_to_text(dw::load_config(opt_path(o.config)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Danger-signal immune engine for syscall policy generation"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Engine config file (key = value)");
        sub->add_option("--seed", o.seed, "RNG seed (overrides the config)");
        sub->add_option("--out-dir", o.out_dir, "Output directory");
        sub->add_flag("-q,--quiet", o.quiet, "Suppress progress output");
    };

    auto* run = app.add_subcommand("run", "Replay a trace and emit the merged policy, action log and report");
    add_common(run);
    run->add_option("--trace", o.trace, "Canonical trace file")->required();
    run->add_option("--metrics", o.metrics, "Metrics file");
    run->add_option("--base-policy", o.base_policy, "User-supplied base policy to extend");

    auto* adapt = app.add_subcommand("adapt-strace", "Convert strace-style output to canonical trace lines");
    add_common(adapt);
    adapt->add_option("input", o.input, "strace output file, '-' for stdin");
    adapt->add_option("--tick-seconds", o.tick_seconds, "Seconds per tick")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check-policy", "Parse and validate a policy file, print it canonically");
    add_common(check);
    check->add_option("policy", o.policy, "Policy file")->required();

    auto* gen = app.add_subcommand("gen-scenario", "Write a seeded synthetic benign or attack fixture");
    add_common(gen);
    gen->add_option("kind", o.kind, "benign or attack")->required()->check(CLI::IsMember({"benign", "attack"}));
    gen->add_option("--ticks", o.ticks, "Number of ticks")->check(CLI::NonNegativeNumber);
    gen->add_option("--burst-start", o.burst_start, "First tick of the attack burst");
    gen->add_option("--burst-length", o.burst_length, "Attack burst length in ticks")->check(CLI::NonNegativeNumber);
    gen->add_option("--attack-reps", o.attack_reps, "Injected 3-grams per burst tick")->check(CLI::PositiveNumber);

    auto* show = app.add_subcommand("show-config", "Print the effective configuration");
    add_common(show);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(o);
        if (adapt->parsed()) return cmd_adapt(o);
        if (check->parsed()) return cmd_check_policy(o);
        if (gen->parsed()) return cmd_gen_scenario(o);
        if (show->parsed()) return cmd_show_config(o);
    } catch (const dw::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
