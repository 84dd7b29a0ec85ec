#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <pybind11/pybind11.h>

#include "dangerwatch/config.hpp"
#include "dangerwatch/dendritic.hpp"
#include "dangerwatch/engine.hpp"
#include "dangerwatch/error.hpp"
#include "dangerwatch/lymph.hpp"
#include "dangerwatch/policy.hpp"
#include "dangerwatch/replay.hpp"
#include "dangerwatch/response.hpp"
#include "dangerwatch/scenario.hpp"
#include "dangerwatch/signals.hpp"
#include "dangerwatch/trace_io.hpp"

namespace py = pybind11;
using namespace dangerwatch;

namespace {

template <typename T>
std::string repr_of(const char* name, const T& text) {
    return std::string("<") + name + " " + text + ">";
}

void bind_errors(py::module_& m) {
    static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<StateError> state_error(m, "StateError", PyExc_RuntimeError);
    static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::object err = py::reinterpret_borrow<py::object>(parse_error)(e.what());
            err.attr("line") = e.line();
            err.attr("column") = e.column();
            PyErr_SetObject(parse_error.ptr(), err.ptr());
        } catch (const InputError& e) {
            PyErr_SetString(input_error.ptr(), e.what());
        } catch (const ConfigError& e) {
            PyErr_SetString(config_error.ptr(), e.what());
        } catch (const StateError& e) {
            PyErr_SetString(state_error.ptr(), e.what());
        }
    });
}

void bind_signals(py::module_& m) {
    py::class_<MetricSample>(m, "MetricSample")
        .def(py::init<>())
        .def(py::init([](Timestep ts, Pid pid, double cpu, double mem) { return MetricSample{ts, pid, cpu, mem}; }),
             py::arg("timestamp"), py::arg("pid"), py::arg("cpu_pct"), py::arg("mem_kb"))
        .def_readwrite("timestamp", &MetricSample::timestamp)
        .def_readwrite("pid", &MetricSample::pid)
        .def_readwrite("cpu_pct", &MetricSample::cpu_pct)
        .def_readwrite("mem_kb", &MetricSample::mem_kb)
        .def(py::self == py::self);

    py::class_<HostSample>(m, "HostSample")
        .def(py::init<>())
        .def(py::init([](Timestep ts, double load, int ncores) { return HostSample{ts, load, ncores}; }),
             py::arg("timestamp"), py::arg("load_avg"), py::arg("ncores"))
        .def_readwrite("timestamp", &HostSample::timestamp)
        .def_readwrite("load_avg", &HostSample::load_avg)
        .def_readwrite("ncores", &HostSample::ncores)
        .def(py::self == py::self);

    py::class_<SignalVector>(m, "SignalVector")
        .def(py::init<>())
        .def_readonly("pamp", &SignalVector::pamp)
        .def_readonly("danger", &SignalVector::danger)
        .def_readonly("safe", &SignalVector::safe)
        .def_readonly("inflammation", &SignalVector::inflammation)
        .def_readonly("timestamp", &SignalVector::timestamp)
        .def(py::self == py::self)
        .def("__repr__", [](const SignalVector& s) {
            return "SignalVector(pamp=" + std::to_string(s.pamp) + ", danger=" + std::to_string(s.danger) +
                   ", safe=" + std::to_string(s.safe) + ", inflammation=" + std::to_string(s.inflammation) + ")";
        });

    py::class_<SignalConfig>(m, "SignalConfig")
        .def(py::init<>())
        .def_readwrite("cpu_scale", &SignalConfig::cpu_scale)
        .def_readwrite("mem_scale", &SignalConfig::mem_scale)
        .def_readwrite("pamp_saturation", &SignalConfig::pamp_saturation)
        .def_readwrite("window", &SignalConfig::window);

    py::class_<ProcessSignals>(m, "ProcessSignals")
        .def_readonly("danger", &ProcessSignals::danger)
        .def_readonly("safe", &ProcessSignals::safe);

    m.def("derive_process_signals", &derive_process_signals, py::arg("prev"), py::arg("cur"),
          py::arg("config") = SignalConfig{});
    m.def("derive_pamp", &derive_pamp, py::arg("violations"), py::arg("config") = SignalConfig{});
    m.def("derive_inflammation", &derive_inflammation, py::arg("host"));
    m.def("build_signal_vector", &build_signal_vector, py::arg("pamp"), py::arg("danger"), py::arg("safe"),
          py::arg("inflammation"), py::arg("timestamp") = 0);
}

void bind_cells(py::module_& m) {
    py::class_<WeightMatrix>(m, "WeightMatrix").def(py::init<>());

    py::enum_<DcContext>(m, "DcContext").value("MATURE", DcContext::Mature).value("SEMI_MATURE", DcContext::SemiMature);
    py::enum_<DcState>(m, "DcState").value("IMMATURE", DcState::Immature).value("MIGRATED", DcState::Migrated);

    py::class_<Peptide>(m, "Peptide")
        .def(py::init([](std::vector<std::string> ngram, std::optional<std::string> arg) {
                 return Peptide{std::move(ngram), std::move(arg), {}};
             }),
             py::arg("syscall_ngram"), py::arg("arg_fragment") = py::none())
        .def_readonly("syscall_ngram", &Peptide::syscall_ngram)
        .def_readonly("arg_fragment", &Peptide::arg_fragment);

    py::class_<MigratedDC>(m, "MigratedDC")
        .def_readonly("dc_id", &MigratedDC::dc_id)
        .def_readonly("context", &MigratedDC::context)
        .def_readonly("csm", &MigratedDC::csm)
        .def_readonly("semi", &MigratedDC::semi)
        .def_readonly("mat", &MigratedDC::mat)
        .def_readonly("peptides", &MigratedDC::peptides);

    py::class_<DendriticCell>(m, "DendriticCell")
        .def(py::init<std::uint64_t, double, std::size_t>(), py::arg("id"), py::arg("migration_threshold"),
             py::arg("peptide_capacity") = 64)
        .def("process_signals", &DendriticCell::process_signals, py::arg("signals"), py::arg("weights") = WeightMatrix{})
        .def("check_migration", &DendriticCell::check_migration)
        .def_property_readonly("context", &DendriticCell::context)
        .def_property_readonly("state", &DendriticCell::state)
        .def_property_readonly("csm", &DendriticCell::csm)
        .def_property_readonly("semi", &DendriticCell::semi)
        .def_property_readonly("mat", &DendriticCell::mat)
        .def_property_readonly("migration_threshold", &DendriticCell::migration_threshold);

    py::enum_<Action>(m, "Action").value("PERMIT", Action::Permit).value("DENY", Action::Deny);

    py::class_<ArgCondition>(m, "ArgCondition")
        .def(py::init([](std::size_t index, std::string substring) { return ArgCondition{index, std::move(substring)}; }),
             py::arg("index"), py::arg("substring"))
        .def_readwrite("index", &ArgCondition::index)
        .def_readwrite("substring", &ArgCondition::substring);

    py::class_<TCR>(m, "TCR")
        .def(py::init([](std::vector<std::string> seq, std::optional<ArgCondition> arg) {
                 return TCR{std::move(seq), std::move(arg)};
             }),
             py::arg("seq_pattern"), py::arg("arg_pattern") = py::none())
        .def_readonly("seq_pattern", &TCR::seq_pattern)
        .def_readonly("arg_pattern", &TCR::arg_pattern);

    m.def("match_tcr", &match_tcr, py::arg("tcr"), py::arg("peptide"));
    m.def("memory_quota", &memory_quota, py::arg("n"), py::arg("fraction") = 0.10);
}

void bind_policy(py::module_& m) {
    py::enum_<DefaultAction>(m, "DefaultAction")
        .value("PERMIT", DefaultAction::Permit)
        .value("DENY", DefaultAction::Deny)
        .value("ASK", DefaultAction::Ask);

    py::class_<PolicyStatement>(m, "PolicyStatement")
        .def(py::init([](std::vector<std::string> seq, Action action, std::optional<ArgCondition> arg) {
                 PolicyStatement st{std::move(seq), std::move(arg), action};
                 validate_statement(st);
                 return st;
             }),
             py::arg("seq_pattern"), py::arg("action"), py::arg("arg_condition") = py::none())
        .def_readonly("seq_pattern", &PolicyStatement::seq_pattern)
        .def_readonly("arg_condition", &PolicyStatement::arg_condition)
        .def_readonly("action", &PolicyStatement::action)
        .def(py::self == py::self)
        .def("__str__", &emit_statement)
        .def("__repr__", [](const PolicyStatement& st) { return repr_of("PolicyStatement", emit_statement(st)); });

    py::class_<PolicySet>(m, "PolicySet")
        .def(py::init<>())
        .def_readwrite("statements", &PolicySet::statements)
        .def_readwrite("default_action", &PolicySet::default_action)
        .def(py::self == py::self)
        .def("__str__", &emit_policy);

    m.def("parse_statement", [](std::string_view line) { return parse_statement(line); }, py::arg("line"));
    m.def("emit_statement", &emit_statement, py::arg("statement"));
    m.def("parse_policy", &parse_policy_text, py::arg("text"));
    m.def("emit_policy", &emit_policy, py::arg("policy"));
    m.def(
        "merge_policies",
        [](const PolicySet& base, const std::vector<PolicyStatement>& additions) { return merge_policies(base, additions); },
        py::arg("base"), py::arg("additions"));
}

void bind_io(py::module_& m) {
    py::class_<AntigenEvent>(m, "AntigenEvent")
        .def(py::init([](Timestep ts, Pid pid, std::string syscall, std::vector<std::string> args, bool violation) {
                 AntigenEvent ev;
                 ev.timestamp = ts;
                 ev.pid = pid;
                 ev.syscall = std::move(syscall);
                 ev.args = std::move(args);
                 ev.violation = violation;
                 return ev;
             }),
             py::arg("timestamp"), py::arg("pid"), py::arg("syscall"), py::arg("args") = std::vector<std::string>{},
             py::arg("violation") = false)
        .def_readonly("timestamp", &AntigenEvent::timestamp)
        .def_readonly("pid", &AntigenEvent::pid)
        .def_readonly("syscall", &AntigenEvent::syscall)
        .def_readonly("args", &AntigenEvent::args)
        .def_readonly("violation", &AntigenEvent::violation)
        .def(py::self == py::self);

    m.def("parse_trace_line", [](std::string_view line) { return parse_trace_line(line); }, py::arg("line"));
    m.def("format_trace_line", &format_trace_line, py::arg("record"));

    py::class_<StraceConversion>(m, "StraceConversion")
        .def_readonly("lines", &StraceConversion::lines)
        .def_readonly("skipped", &StraceConversion::skipped);
    m.def("adapt_strace", &adapt_strace_lines, py::arg("lines"), py::arg("tick_seconds") = 1.0);
}

void bind_engine(py::module_& m) {
    py::class_<EngineConfig>(m, "EngineConfig")
        .def(py::init<>())
        .def_readwrite("rng_seed", &EngineConfig::rng_seed)
        .def_readwrite("dc_population_size", &EngineConfig::dc_population_size)
        .def_readwrite("tissue_capacity", &EngineConfig::tissue_capacity)
        .def_readwrite("timestamps_per_tick", &EngineConfig::timestamps_per_tick)
        .def_readwrite("signals", &EngineConfig::signals)
        .def("finalize", &EngineConfig::finalize)
        .def("__str__", &config_to_text);
    m.def("parse_config", &parse_config_text, py::arg("text"));
    m.def("config_keys", &config_keys);

    py::class_<TickSummary>(m, "TickSummary")
        .def_readonly("tick", &TickSummary::tick)
        .def_readonly("records", &TickSummary::records)
        .def_readonly("antigens", &TickSummary::antigens)
        .def_readonly("pooled", &TickSummary::pooled)
        .def_readonly("migrated_mature", &TickSummary::migrated_mature)
        .def_readonly("migrated_semi", &TickSummary::migrated_semi)
        .def_readonly("naive_created", &TickSummary::naive_created)
        .def_readonly("naive_in", &TickSummary::naive_in)
        .def_readonly("effectors_deny", &TickSummary::effectors_deny)
        .def_readonly("effectors_permit", &TickSummary::effectors_permit)
        .def_readonly("naive_survivors", &TickSummary::naive_survivors)
        .def_readonly("naive_deleted", &TickSummary::naive_deleted)
        .def_readonly("statements_added", &TickSummary::statements_added)
        .def_readonly("actions_deny", &TickSummary::actions_deny)
        .def_readonly("actions_permit", &TickSummary::actions_permit)
        .def_readonly("memory_promoted", &TickSummary::memory_promoted)
        .def_readonly("effectors_died", &TickSummary::effectors_died);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("ticks", &RunReport::ticks)
        .def_readonly("records", &RunReport::records)
        .def_readonly("dcs_migrated_mature", &RunReport::dcs_migrated_mature)
        .def_readonly("dcs_migrated_semi", &RunReport::dcs_migrated_semi)
        .def_readonly("naive_created", &RunReport::naive_created)
        .def_readonly("effectors_deny", &RunReport::effectors_deny)
        .def_readonly("effectors_permit", &RunReport::effectors_permit)
        .def_readonly("actions_deny", &RunReport::actions_deny)
        .def_readonly("actions_permit", &RunReport::actions_permit)
        .def_readonly("memory_cells", &RunReport::memory_cells)
        .def_readonly("policy", &RunReport::policy)
        .def("__str__", &RunReport::to_text);

    py::class_<ActionEvent>(m, "ActionEvent")
        .def_readonly("timestamp", &ActionEvent::timestamp)
        .def_readonly("pid", &ActionEvent::pid)
        .def_readonly("statement", &ActionEvent::statement)
        .def_readonly("action", &ActionEvent::action)
        .def_readonly("effector_id", &ActionEvent::effector_id);

    py::class_<Engine>(m, "Engine")
        .def(py::init<EngineConfig, PolicySet>(), py::arg("config") = EngineConfig{}, py::arg("base_policy") = PolicySet{})
        .def("tick", [](Engine& e, const std::vector<Record>& batch) { return e.tick(batch); }, py::arg("records"))
        .def("report", &Engine::report)
        .def_property_readonly("policy", &Engine::policy)
        .def_property_readonly("action_log", &Engine::action_log)
        .def_property_readonly("naive_count", [](const Engine& e) { return e.naive().size(); })
        .def_property_readonly("effector_count", [](const Engine& e) { return e.effectors().size(); });

    py::enum_<ScenarioKind>(m, "ScenarioKind").value("BENIGN", ScenarioKind::Benign).value("ATTACK", ScenarioKind::Attack);
    py::class_<ScenarioParams>(m, "ScenarioParams")
        .def(py::init<>())
        .def_readwrite("kind", &ScenarioParams::kind)
        .def_readwrite("ticks", &ScenarioParams::ticks)
        .def_readwrite("seed", &ScenarioParams::seed)
        .def_readwrite("burst_start", &ScenarioParams::burst_start)
        .def_readwrite("burst_length", &ScenarioParams::burst_length)
        .def_readwrite("attack_reps_per_tick", &ScenarioParams::attack_reps_per_tick);
    py::class_<Scenario>(m, "Scenario")
        .def_readonly("trace", &Scenario::trace)
        .def_readonly("metrics", &Scenario::metrics)
        .def_readonly("injected_ngram", &Scenario::injected_ngram)
        .def_readonly("injected_args", &Scenario::injected_args)
        .def("records", [](const Scenario& s) { return merge_records(s.trace, s.metrics); },
             "Trace and metrics merged in time order.");
    m.def("generate_scenario", &generate_scenario, py::arg("params"));
    m.def("write_scenario", &write_scenario, py::arg("scenario"), py::arg("out_dir"));

    py::class_<ReplayResult>(m, "ReplayResult")
        .def_readonly("report", &ReplayResult::report)
        .def_readonly("policy_text", &ReplayResult::policy_text)
        .def_readonly("action_log", &ReplayResult::action_log)
        .def_readonly("report_text", &ReplayResult::report_text)
        .def_readonly("warnings", &ReplayResult::warnings);
    m.def(
        "replay_records",
        [](EngineConfig cfg, const std::vector<Record>& records, PolicySet base) {
            cfg.finalize();
            return replay_records(cfg, std::move(base), records);
        },
        py::arg("config"), py::arg("records"), py::arg("base_policy") = PolicySet{});
    m.def(
        "run_replay",
        [](std::filesystem::path trace, std::optional<std::filesystem::path> metrics,
           std::optional<std::filesystem::path> base_policy, std::optional<std::filesystem::path> config,
           std::optional<std::uint64_t> seed) {
            return run_replay(ReplayInputs{std::move(trace), std::move(metrics), std::move(base_policy), std::move(config), seed});
        },
        py::arg("trace"), py::arg("metrics") = py::none(), py::arg("base_policy") = py::none(), py::arg("config") = py::none(),
        py::arg("seed") = py::none());
    m.def("write_replay_outputs", &write_replay_outputs, py::arg("result"), py::arg("out_dir"));
}

}  // namespace

PYBIND11_MODULE(_dangerwatch, m) {
    m.doc() = "Immune-inspired syscall policy learner";
    bind_errors(m);
    bind_signals(m);
    bind_cells(m);
    bind_policy(m);
    bind_io(m);
    bind_engine(m);
}
