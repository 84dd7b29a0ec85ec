#include "dangerwatch/trace_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

struct Field {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Field> split_tabs(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back({line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start), start + 1});
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

template <typename T>
T number(const Field& f, std::size_t line_no, const char* what) {
    T value{};
    const auto* end = f.text.data() + f.text.size();
    const auto [ptr, ec] = std::from_chars(f.text.data(), end, value);
    if (f.text.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(line_no, f.column, std::string("bad ") + what + " '" + std::string(f.text) + "'");
    }
    return value;
}

void check_nonnegative(double v, const Field& f, std::size_t line_no, const char* what) {
    if (!(v >= 0.0) || std::isinf(v)) throw ParseError(line_no, f.column, std::string(what) + " must be finite and >= 0");
}

std::vector<std::string> split_args(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto bar = text.find('|', start);
        out.emplace_back(text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return out;
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

MetricSample metric_from(const Field& ts, const Field& pid, const Field& cpu, const Field& mem, std::size_t line_no) {
    MetricSample m{number<Timestep>(ts, line_no, "timestamp"), number<Pid>(pid, line_no, "pid"),
                   number<double>(cpu, line_no, "cpu_pct"), number<double>(mem, line_no, "mem_kb")};
    check_nonnegative(m.cpu_pct, cpu, line_no, "cpu_pct");
    check_nonnegative(m.mem_kb, mem, line_no, "mem_kb");
    return m;
}

HostSample host_from(const Field& ts, const Field& load, const Field& cores, std::size_t line_no) {
    HostSample h{number<Timestep>(ts, line_no, "timestamp"), number<double>(load, line_no, "load_avg"),
                 number<int>(cores, line_no, "ncores")};
    check_nonnegative(h.load_avg, load, line_no, "load_avg");
    if (h.ncores < 1) throw ParseError(line_no, cores.column, "ncores must be >= 1");
    return h;
}

bool skippable(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#';
}

template <typename Parse>
std::vector<Record> read_lines(std::istream& in, Parse parse) {
    std::vector<Record> out;
    std::string line;
    std::size_t line_no = 0;
    Timestep last = std::numeric_limits<Timestep>::min();
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        Record r = parse(line, line_no);
        const Timestep ts = record_timestamp(r);
        if (ts < last) throw ParseError(line_no, 1, "timestamp goes backwards");
        last = ts;
        out.push_back(std::move(r));
    }
    return out;
}

// Extracts the first call argument from the text after '('. Quoted strings
// are unescaped for \" and \\ only; other escapes are kept verbatim.
std::optional<std::string> first_argument(std::string_view rest) {
    std::size_t i = 0;
    while (i < rest.size() && rest[i] == ' ') ++i;
    if (i < rest.size() && rest[i] == '"') {
        std::string out;
        for (++i; i < rest.size(); ++i) {
            const char c = rest[i];
            if (c == '"') return out;
            if (c == '\\' && i + 1 < rest.size() && (rest[i + 1] == '"' || rest[i + 1] == '\\')) {
                out.push_back(rest[++i]);
                continue;
            }
            out.push_back(c);
        }
        return std::nullopt;
    }
    int depth = 0;
    const std::size_t start = i;
    for (; i < rest.size(); ++i) {
        const char c = rest[i];
        if (c == '{' || c == '[' || c == '(') ++depth;
        if ((c == '}' || c == ']') && depth > 0) --depth;
        if (c == ')' && depth > 0) {
            --depth;
            continue;
        }
        if (depth == 0 && (c == ',' || c == ')')) break;
    }
    if (i >= rest.size()) return std::nullopt;
    std::string_view arg = rest.substr(start, i - start);
    while (!arg.empty() && arg.back() == ' ') arg.remove_suffix(1);
    return std::string(arg);
}

std::optional<std::string> convert_strace_line(std::string_view line, double tick_seconds) {
    if (line.find("<unfinished") != std::string_view::npos || line.find("resumed>") != std::string_view::npos) {
        return std::nullopt;
    }
    std::istringstream head{std::string(line)};
    std::string ts_text;
    std::string pid_text;
    if (!(head >> ts_text >> pid_text)) return std::nullopt;

    double epoch = 0.0;
    {
        const auto [ptr, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), epoch);
        if (ec != std::errc{} || ptr != ts_text.data() + ts_text.size() || !(epoch >= 0.0)) return std::nullopt;
    }
    Pid pid = 0;
    {
        const auto [ptr, ec] = std::from_chars(pid_text.data(), pid_text.data() + pid_text.size(), pid);
        if (ec != std::errc{} || ptr != pid_text.data() + pid_text.size()) return std::nullopt;
    }

    std::string call;
    std::getline(head >> std::ws, call);
    const auto paren = call.find('(');
    if (paren == std::string::npos || paren == 0) return std::nullopt;
    const std::string name = call.substr(0, paren);
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;
    }
    const std::string_view rest = std::string_view(call).substr(paren + 1);
    if (rest.find(") =") == std::string_view::npos && rest.find(")=") == std::string_view::npos) return std::nullopt;
    auto arg = first_argument(rest);
    if (!arg) return std::nullopt;
    if (arg->find_first_of("\t\r\n") != std::string::npos) return std::nullopt;  // not representable in a TSV field

    const auto tick = static_cast<Timestep>(std::floor(epoch / tick_seconds));
    return "S\t" + std::to_string(tick) + "\t" + std::to_string(pid) + "\t" + name + "\t" + *arg;
}

}  // namespace

Timestep record_timestamp(const Record& r) {
    return std::visit([](const auto& v) { return v.timestamp; }, r);
}

Record parse_trace_line(std::string_view line, std::size_t line_no) {
    const auto f = split_tabs(line);
    const std::string_view tag = f[0].text;
    if (tag == "S") {
        if (f.size() != 5 && f.size() != 6) throw ParseError(line_no, 1, "syscall record needs 5 or 6 fields");
        AntigenEvent ev;
        ev.timestamp = number<Timestep>(f[1], line_no, "timestamp");
        ev.pid = number<Pid>(f[2], line_no, "pid");
        if (f[3].text.empty()) throw ParseError(line_no, f[3].column, "empty syscall name");
        ev.syscall = std::string(f[3].text);
        ev.args = split_args(f[4].text);
        if (f.size() == 6) {
            if (f[5].text != "V") throw ParseError(line_no, f[5].column, "violation flag must be 'V'");
            ev.violation = true;
        }
        return ev;
    }
    if (tag == "M") {
        if (f.size() != 5) throw ParseError(line_no, 1, "metric record needs 5 fields");
        return metric_from(f[1], f[2], f[3], f[4], line_no);
    }
    if (tag == "H") {
        if (f.size() != 4) throw ParseError(line_no, 1, "host record needs 4 fields");
        return host_from(f[1], f[2], f[3], line_no);
    }
    throw ParseError(line_no, 1, "unknown record tag '" + std::string(tag) + "'");
}

std::string format_trace_line(const Record& r) {
    if (const auto* ev = std::get_if<AntigenEvent>(&r)) {
        std::string out = "S\t" + std::to_string(ev->timestamp) + "\t" + std::to_string(ev->pid) + "\t" + ev->syscall + "\t";
        for (std::size_t i = 0; i < ev->args.size(); ++i) {
            if (i > 0) out += '|';
            out += ev->args[i];
        }
        if (ev->violation) out += "\tV";
        return out;
    }
    if (const auto* m = std::get_if<MetricSample>(&r)) {
        return "M\t" + std::to_string(m->timestamp) + "\t" + std::to_string(m->pid) + "\t" + format_double(m->cpu_pct) +
               "\t" + format_double(m->mem_kb);
    }
    const auto& h = std::get<HostSample>(r);
    return "H\t" + std::to_string(h.timestamp) + "\t" + format_double(h.load_avg) + "\t" + std::to_string(h.ncores);
}

std::variant<MetricSample, HostSample> parse_metrics_line(std::string_view line, std::size_t line_no) {
    const auto f = split_tabs(line);
    if (f.size() != 4) throw ParseError(line_no, 1, "metrics record needs 4 fields");
    if (f[1].text == "HOST") return host_from(f[0], f[2], f[3], line_no);
    return metric_from(f[0], f[1], f[2], f[3], line_no);
}

std::string format_metrics_line(const std::variant<MetricSample, HostSample>& r) {
    if (const auto* m = std::get_if<MetricSample>(&r)) {
        return std::to_string(m->timestamp) + "\t" + std::to_string(m->pid) + "\t" + format_double(m->cpu_pct) + "\t" +
               format_double(m->mem_kb);
    }
    const auto& h = std::get<HostSample>(r);
    return std::to_string(h.timestamp) + "\tHOST\t" + format_double(h.load_avg) + "\t" + std::to_string(h.ncores);
}

std::vector<Record> read_trace(std::istream& in) {
    return read_lines(in, [](std::string_view line, std::size_t n) { return parse_trace_line(line, n); });
}

std::vector<Record> read_metrics(std::istream& in) {
    return read_lines(in, [](std::string_view line, std::size_t n) {
        return std::visit([](auto v) { return Record{v}; }, parse_metrics_line(line, n));
    });
}

StraceConversion adapt_strace_lines(const std::vector<std::string>& raw, double tick_seconds) {
    if (!(tick_seconds > 0.0)) throw ConfigError("tick_seconds must be positive");
    StraceConversion out;
    for (const auto& line : raw) {
        if (skippable(line)) continue;
        if (auto converted = convert_strace_line(line, tick_seconds)) {
            out.lines.push_back(std::move(*converted));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

StraceConversion adapt_strace(std::istream& in, double tick_seconds) {
    std::vector<std::string> raw;
    std::string line;
    while (std::getline(in, line)) raw.push_back(line);
    return adapt_strace_lines(raw, tick_seconds);
}

}  // namespace dangerwatch
