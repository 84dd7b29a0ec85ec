#include "doctest.h"

#include <sstream>

#include "dangerwatch/error.hpp"
#include "dangerwatch/random.hpp"
#include "dangerwatch/trace_io.hpp"

using namespace dangerwatch;

TEST_CASE("canonical trace lines") {
    const auto r = parse_trace_line("S\t12\t433\topen\t/etc/passwd|0\tV");
    const auto& ev = std::get<AntigenEvent>(r);
    CHECK(ev.timestamp == 12);
    CHECK(ev.pid == 433);
    CHECK(ev.syscall == "open");
    CHECK(ev.args == std::vector<std::string>{"/etc/passwd", "0"});
    CHECK(ev.violation);

    const auto plain = std::get<AntigenEvent>(parse_trace_line("S\t1\t2\tgetpid\t"));
    CHECK(plain.args.empty());
    CHECK_FALSE(plain.violation);

    const auto host = std::get<HostSample>(parse_trace_line("H\t12\t0.5\t4"));
    CHECK(host.timestamp == 12);
    CHECK(host.load_avg == 0.5);
    CHECK(host.ncores == 4);

    const auto m = std::get<MetricSample>(parse_trace_line("M\t3\t9\t12.5\t2048"));
    CHECK(m.pid == 9);
    CHECK(m.cpu_pct == 12.5);
    CHECK(m.mem_kb == 2048);
}

TEST_CASE("trace parse errors carry positions") {
    const auto fails = [](const char* line) { CHECK_THROWS_AS(parse_trace_line(line), ParseError); };
    fails("X\t1\t2");
    fails("S\t1\t2\topen");
    fails("S\t1\t2\topen\ta\tV\textra");
    fails("S\t1\t2\topen\ta\tX");
    fails("S\tx\t2\topen\ta");
    fails("S\t1\t2\t\ta");
    fails("H\t1\t0.5");
    fails("H\t1\t-0.5\t4");
    fails("H\t1\t0.5\t0");
    fails("M\t1\t2\t-1\t5");
    try {
        parse_trace_line("S\t1\tabc\topen\t", 17);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 17);
        CHECK(e.column() == 5);
    }
}

TEST_CASE("trace round trip on canonical lines") {
    Rng rng(31);
    const std::vector<std::string> names{"open", "read", "execve", "mmap"};
    for (int i = 0; i < 500; ++i) {
        Record r;
        switch (rng.index(3)) {
            case 0: {
                AntigenEvent ev;
                ev.timestamp = static_cast<Timestep>(rng.index(100000));
                ev.pid = static_cast<Pid>(rng.index(70000));
                ev.syscall = names[rng.index(names.size())];
                const auto nargs = rng.index(4);
                for (std::size_t k = 0; k < nargs; ++k) ev.args.push_back("/a b/" + std::to_string(rng.index(1000)));
                ev.violation = rng.bernoulli(0.3);
                r = ev;
                break;
            }
            case 1: r = MetricSample{static_cast<Timestep>(rng.index(1000)), 5, rng.uniform(0, 400), rng.uniform(0, 1e7)}; break;
            default: r = HostSample{static_cast<Timestep>(rng.index(1000)), rng.uniform(0, 64), 1 + static_cast<int>(rng.index(64))};
        }
        const auto line = format_trace_line(r);
        const auto back = parse_trace_line(line);
        CHECK(format_trace_line(back) == line);
        if (const auto* ev = std::get_if<AntigenEvent>(&r)) CHECK(std::get<AntigenEvent>(back) == *ev);
    }
}

TEST_CASE("metrics file lines") {
    const auto m = std::get<MetricSample>(parse_metrics_line("5\t101\t7.5\t1024"));
    CHECK(m.timestamp == 5);
    CHECK(m.pid == 101);
    const auto h = std::get<HostSample>(parse_metrics_line("5\tHOST\t1.25\t8"));
    CHECK(h.ncores == 8);
    CHECK(format_metrics_line(h) == "5\tHOST\t1.25\t8");
    CHECK_THROWS_AS(parse_metrics_line("5\t101\t7.5"), ParseError);
}

TEST_CASE("file readers enforce time order") {
    std::istringstream ok("# header\nS\t1\t2\topen\t\n\nS\t1\t2\tread\t\nH\t3\t0.1\t1\n");
    CHECK(read_trace(ok).size() == 3);
    std::istringstream back("S\t5\t2\topen\t\nS\t4\t2\tread\t\n");
    try {
        read_trace(back);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream metrics("0\t1\t1\t1\n0\tHOST\t1\t2\n1\t1\t2\t2\n");
    CHECK(read_metrics(metrics).size() == 3);
}

TEST_CASE("strace adapter") {
    const auto conv = adapt_strace_lines({"1699.01 433 open(\"/etc/passwd\", O_RDONLY) = 3"});
    REQUIRE(conv.lines.size() == 1);
    CHECK(conv.lines[0] == "S\t1699\t433\topen\t/etc/passwd");
    CHECK(conv.skipped == 0);
    // The converted line is canonical.
    CHECK(std::get<AntigenEvent>(parse_trace_line(conv.lines[0])).args == std::vector<std::string>{"/etc/passwd"});

    const auto split = adapt_strace_lines({
        "1699.02 433 read(3,  <unfinished ...>",
        "1699.03 433 <... read resumed>\"root\", 4096) = 4",
        "1699.04 433 --- SIGCHLD {si_signo=SIGCHLD} ---",
        "1699.05 433 +++ exited with 0 +++",
        "garbage",
        "1699.06 433 getpid() = 433",
        "1699.07 433 mmap(NULL, 4096, PROT_READ, MAP_PRIVATE, 3, 0) = 0x7f00",
        "1699.08 433 fstat(3, {st_mode=S_IFREG|0644, st_size=1}) = 0",
        "1700.50 434 write(1, \"a|b\", 3) = 3",
        "1700.90 434 execve(\"/bin/\\\"sh\", [\"sh\"], 0x7ffd /* 2 vars */) = 0",
    });
    CHECK(split.skipped == 5);
    REQUIRE(split.lines.size() == 5);
    CHECK(split.lines[0] == "S\t1699\t433\tgetpid\t");
    CHECK(split.lines[1] == "S\t1699\t433\tmmap\tNULL");
    CHECK(split.lines[2] == "S\t1699\t433\tfstat\t3");
    CHECK(split.lines[3] == "S\t1700\t434\twrite\t1");
    CHECK(split.lines[4] == "S\t1700\t434\texecve\t/bin/\"sh");

    const auto odd = adapt_strace_lines({"1701 435 open(\"/tmp/a|b\", O_RDONLY) = 3", "1701 435 open(\"/tmp/a\\tb\", 0) = 3"});
    REQUIRE(odd.lines.size() == 2);
    CHECK(odd.lines[0] == "S\t1701\t435\topen\t/tmp/a|b");
    // Only \" and \\ are unescaped, so the escape survives as two characters.
    CHECK(odd.lines[1] == "S\t1701\t435\topen\t/tmp/a\\tb");

    CHECK(adapt_strace_lines({}).lines.empty());
    std::istringstream empty("");
    CHECK(adapt_strace(empty).lines.empty());

    const auto ticks = adapt_strace_lines({"10.5 1 close(3) = 0"}, 0.25);
    CHECK(ticks.lines[0] == "S\t42\t1\tclose\t3");
}
